#pragma once

// Primitives on the unit sphere S^d embedded in R^{d+1}: points, caps,
// surface measures, the incomplete sine integral and random rotations.

#include <Eigen/Dense>

#include <numbers>

#include "sphertess/error.hpp"
#include "sphertess/random.hpp"

namespace sphertess {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// A point of S^d stored as a unit vector of R^{d+1}. Also encodes the great
/// subsphere x^perp through its normal.
class UnitVec {
 public:
  UnitVec() = default;

  /// Normalizes `coords`; throws on a zero vector or when d < 2.
  explicit UnitVec(Vec coords);
  UnitVec(std::initializer_list<double> coords);

  /// i-th standard basis vector of R^{d+1}.
  static UnitVec basis(int d, int i);

  /// The spherical origin: the first standard basis vector.
  static UnitVec origin(int d) { return basis(d, 0); }

  int dim() const noexcept { return static_cast<int>(coords_.size()) - 1; }
  int ambient() const noexcept { return static_cast<int>(coords_.size()); }
  const Vec& coords() const noexcept { return coords_; }
  double operator[](int i) const { return coords_[i]; }

  double dot(const UnitVec& other) const;
  double dot(const Vec& v) const { return coords_.dot(v); }

  UnitVec operator-() const;

 private:
  struct Trusted {};
  UnitVec(Vec coords, Trusted) : coords_(std::move(coords)) {}
  friend class Rotation;

  Vec coords_;
};

void require_same_dim(const UnitVec& a, const UnitVec& b);

/// Geodesic ball B(center, radius) with radius in [0, pi].
class Cap {
 public:
  Cap(UnitVec center, double radius);

  const UnitVec& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return center_.dim(); }

  /// Proper spherical cap: radius <= pi/2.
  bool proper() const noexcept { return radius_ <= kHalfPi; }
  bool contains(const UnitVec& y) const;

 private:
  UnitVec center_;
  double radius_;
};

/// arccos of the clamped inner product, in [0, pi].
double geodesic_distance(const UnitVec& x, const UnitVec& y);

/// Surface area of S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
double omega(int n);

/// D_d(x) = int_0^x sin^{d-1}(t) dt on [0, pi].
double sine_integral_D(int d, double x);

/// sigma_d(B(e, r)) = omega_d * D_d(r).
double cap_volume(int d, double r);

/// Radius of the cap with the given volume (inverse of cap_volume), tol 1e-12.
double cap_radius_for_volume(int d, double volume);

/// U_1 of a cap of radius a in [0, pi/2]:
/// (omega_d / omega_{d+1}) int_0^a cos^{d-1}(t) dt.
double cap_U1(int d, double a);

/// Rotation-invariant sample from S^d (normalized Gaussian).
UnitVec sample_uniform(Rng& rng, int d);

/// Proper rotation of R^{d+1} (orthogonal, det +1).
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(Mat m);

  static Rotation identity(int d);

  int dim() const noexcept { return static_cast<int>(m_.rows()) - 1; }
  const Mat& matrix() const noexcept { return m_; }

  UnitVec apply(const UnitVec& x) const;
  Vec apply(const Vec& x) const { return m_ * x; }
  UnitVec operator()(const UnitVec& x) const { return apply(x); }

  Rotation inverse() const { return Rotation(Mat(m_.transpose()), Unchecked{}); }
  Rotation operator*(const Rotation& rhs) const { return Rotation(Mat(m_ * rhs.m_), Unchecked{}); }

 private:
  struct Unchecked {};
  Rotation(Mat m, Unchecked) : m_(std::move(m)) {}
  friend Rotation haar_rotation(Rng& rng, int d);
  friend Rotation transporter(const UnitVec& x);

  Mat m_;
};

/// Uniform (Haar) random element of SO(d+1).
Rotation haar_rotation(Rng& rng, int d);

/// Uniform random rotation of R^{d+1} fixing the spherical origin.
Rotation random_rotation_fixing_origin(Rng& rng, int d);

/// Deterministic proper rotation mapping the origin onto x: a product of the
/// Householder reflection exchanging e_0 and x with the fixed reflection
/// flipping the last axis. Identity when x is the origin.
Rotation transporter(const UnitVec& x);

/// transporter(x) composed with a uniform rotation fixing the origin; repeated
/// draws sample the kernel kappa(x, .).
Rotation rotation_to(const UnitVec& x, Rng& rng);

}  // namespace sphertess
