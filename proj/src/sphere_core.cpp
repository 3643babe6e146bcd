#include "sphertess/sphere_core.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sphertess {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::NotInterior: return "not interior";
    case ErrorKind::Improper: return "improper body";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Degenerate: return "degenerate configuration";
    case ErrorKind::PreconditionFailed: return "precondition failed";
  }
  return "unknown";
}

// ---------------------------------------------------------------- UnitVec

UnitVec::UnitVec(Vec coords) : coords_(std::move(coords)) {
  if (coords_.size() < 3) {
    throw GeometryError(ErrorKind::DimensionMismatch, "UnitVec needs d >= 2 (at least 3 coordinates)");
  }
  const double norm = coords_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw GeometryError(ErrorKind::OutOfRange, "cannot normalize a zero or non-finite vector");
  }
  coords_ /= norm;
}

UnitVec::UnitVec(std::initializer_list<double> coords)
    : UnitVec(Vec(Eigen::Map<const Vec>(coords.begin(), static_cast<Eigen::Index>(coords.size())))) {}

UnitVec UnitVec::basis(int d, int i) {
  if (d < 2 || i < 0 || i > d) throw GeometryError(ErrorKind::OutOfRange, "basis index");
  Vec v = Vec::Zero(d + 1);
  v[i] = 1.0;
  return UnitVec(std::move(v), Trusted{});
}

double UnitVec::dot(const UnitVec& other) const {
  require_same_dim(*this, other);
  return coords_.dot(other.coords_);
}

UnitVec UnitVec::operator-() const { return UnitVec(Vec(-coords_), Trusted{}); }

void require_same_dim(const UnitVec& a, const UnitVec& b) {
  if (a.ambient() != b.ambient()) {
    throw GeometryError(ErrorKind::DimensionMismatch,
                        "points live on S^" + std::to_string(a.dim()) + " and S^" + std::to_string(b.dim()));
  }
}

// -------------------------------------------------------------------- Cap

Cap::Cap(UnitVec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius >= 0.0 && radius <= kPi)) throw GeometryError(ErrorKind::OutOfRange, "cap radius must lie in [0, pi]");
}

bool Cap::contains(const UnitVec& y) const { return geodesic_distance(center_, y) <= radius_ + 1e-12; }

// ---------------------------------------------------------------- measures

double geodesic_distance(const UnitVec& x, const UnitVec& y) {
  return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

double omega(int n) {
  if (n < 1) throw GeometryError(ErrorKind::OutOfRange, "omega(n) needs n >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double sine_integral_D(int d, double x) {
  if (d < 2) throw GeometryError(ErrorKind::OutOfRange, "sine_integral_D needs d >= 2");
  if (!(x >= 0.0 && x <= kPi + 1e-15)) throw GeometryError(ErrorKind::OutOfRange, "sine_integral_D needs x in [0, pi]");
  x = std::min(x, kPi);
  if (d == 2) return 1.0 - std::cos(x);
  if (d == 3) return 0.5 * (x - std::sin(x) * std::cos(x));
  if (x == 0.0) return 0.0;
  const int power = d - 1;
  auto integrand = [power](double t) { return std::pow(std::sin(t), power); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 12, 1e-12);
}

double cap_volume(int d, double r) {
  if (!(r >= 0.0 && r <= kPi + 1e-15)) throw GeometryError(ErrorKind::OutOfRange, "cap radius must lie in [0, pi]");
  return omega(d) * sine_integral_D(d, std::min(r, kPi));
}

double cap_radius_for_volume(int d, double volume) {
  const double total = omega(d + 1);
  if (!(volume >= 0.0 && volume <= total * (1.0 + 1e-14))) {
    throw GeometryError(ErrorKind::OutOfRange, "cap volume must lie in [0, omega_{d+1}]");
  }
  if (volume <= 0.0) return 0.0;
  if (volume >= total) return kPi;
  if (d == 2) return std::acos(std::clamp(1.0 - volume / (2.0 * kPi), -1.0, 1.0));
  const double omega_d = omega(d);
  auto f = [&](double r) { return omega_d * sine_integral_D(d, r) - volume; };
  auto tol = [](double lo, double hi) { return hi - lo <= 1e-13; };
  const auto [lo, hi] = boost::math::tools::bisect(f, 0.0, kPi, tol);
  return 0.5 * (lo + hi);
}

double cap_U1(int d, double a) {
  if (!(a >= 0.0 && a <= kHalfPi + 1e-15)) throw GeometryError(ErrorKind::OutOfRange, "cap_U1 needs a in [0, pi/2]");
  a = std::min(a, kHalfPi);
  // int_0^a cos^{d-1} = D(pi/2) - D(pi/2 - a)
  const double integral = d == 2 ? std::sin(a) : sine_integral_D(d, kHalfPi) - sine_integral_D(d, kHalfPi - a);
  return omega(d) / omega(d + 1) * integral;
}

// ---------------------------------------------------------------- sampling

UnitVec sample_uniform(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  Vec v(d + 1);
  double norm2 = 0.0;
  do {
    for (int i = 0; i <= d; ++i) v[i] = normal(rng);
    norm2 = v.squaredNorm();
  } while (norm2 < 1e-24);
  return UnitVec(std::move(v));
}

// --------------------------------------------------------------- rotations

Rotation::Rotation(Mat m) : m_(std::move(m)) {
  const auto n = m_.rows();
  if (n != m_.cols() || n < 3) throw GeometryError(ErrorKind::DimensionMismatch, "rotation must be square, size >= 3");
  if (!(m_.transpose() * m_).isApprox(Mat::Identity(n, n), 1e-9) || m_.determinant() < 0.0) {
    throw GeometryError(ErrorKind::OutOfRange, "matrix is not a proper rotation");
  }
}

Rotation Rotation::identity(int d) { return Rotation(Mat(Mat::Identity(d + 1, d + 1)), Unchecked{}); }

UnitVec Rotation::apply(const UnitVec& x) const {
  if (x.ambient() != m_.rows()) throw GeometryError(ErrorKind::DimensionMismatch, "rotation/point dimensions differ");
  Vec y = m_ * x.coords();
  y.normalize();
  return UnitVec(std::move(y), UnitVec::Trusted{});
}

Rotation haar_rotation(Rng& rng, int d) {
  const int n = d + 1;
  std::normal_distribution<double> normal;
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign correction makes Q Haar on O(n); one column flip restricts to SO(n).
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return Rotation(std::move(q), Rotation::Unchecked{});
}

Rotation random_rotation_fixing_origin(Rng& rng, int d) {
  Mat m = Mat::Identity(d + 1, d + 1);
  if (d >= 2) {
    // SO(d) acting on the coordinates orthogonal to e_0.
    const int n = d;
    std::normal_distribution<double> normal;
    Mat g(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    if (q.determinant() < 0.0) q.col(0) = -q.col(0);
    m.bottomRightCorner(n, n) = q;
  }
  return Rotation(std::move(m));
}

Rotation transporter(const UnitVec& x) {
  const int n = x.ambient();
  Vec w = -x.coords();
  w[0] += 1.0;  // e_0 - x
  const double norm = w.norm();
  if (norm < 1e-14) return Rotation::identity(x.dim());
  w /= norm;
  Mat householder = Mat::Identity(n, n) - 2.0 * w * w.transpose();
  // Right-multiplying by diag(1, ..., 1, -1) fixes e_0 and restores det +1.
  householder.col(n - 1) = -householder.col(n - 1);
  return Rotation(std::move(householder), Rotation::Unchecked{});
}

Rotation rotation_to(const UnitVec& x, Rng& rng) {
  return transporter(x) * random_rotation_fixing_origin(rng, x.dim());
}

}  // namespace sphertess
