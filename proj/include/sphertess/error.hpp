#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphertess {

enum class ErrorKind {
  DimensionMismatch,
  OutOfRange,
  NotInterior,       // a required centre/origin lies outside the body
  Improper,          // body not contained in an open hemisphere
  Infeasible,        // empty interior
  Degenerate,        // non-generic configuration; callers resample
  PreconditionFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Tagged error raised by every geometric routine in place of NaN results.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sphertess
