#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace llhmm {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grid spacing does not resolve the oscillation scale of a coefficient.
struct GridTooCoarse : Error {
  using Error::Error;
};

/// Two fields with incompatible grids were combined.
struct GridMismatch : Error {
  using Error::Error;
};

/// A kernel moment system solve failed its post-construction verification.
struct IllConditioned : Error {
  using Error::Error;
};

/// An iterative solver did not reach its residual target.
struct NoConvergence : Error {
  using Error::Error;
};

/// A dense solve was requested beyond the supported problem size.
struct TooLarge : Error {
  using Error::Error;
};

/// The implicit midpoint fixed-point iteration failed to contract.
struct FixedPointDiverged : Error {
  using Error::Error;
};

/// Initial data degenerated (near-zero magnetization before renormalization).
struct DegenerateData : Error {
  using Error::Error;
};

/// An averaging window does not fit inside the periodic domain.
struct WindowExceedsDomain : Error {
  using Error::Error;
};

/// A rate fit was requested on non-positive or insufficient data.
struct DegenerateFit : Error {
  using Error::Error;
};

/// Sweep configuration failed validation; carries per-field diagnostics.
class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& i : v) {
      s += "\n  - " + i;
    }
    return s;
  }
  std::vector<std::string> issues_;
};

}  // namespace llhmm
