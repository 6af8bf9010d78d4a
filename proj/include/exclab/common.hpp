#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace exclab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance for "this point lies on the unit circle".
inline constexpr double kBoundaryTol = 1e-12;
/// Below this separation two kernel arguments are treated as coincident.
inline constexpr double kCoincidentTol = 1e-9;

enum class ErrorCode {
  coincident_points,
  domain,
  nonconvergence,
  rejection_budget,
  degenerate_map,
  too_wide,
  general_position,
  resolution,
  infeasible,
  insufficient_hits,
  starved_bins,
  size,
  inconsistent_arrangement,
  config,
  digest_mismatch,
};

std::string_view to_string(ErrorCode code);

/// Every module error carries a machine-readable code; the CLI turns it into
/// a structured error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Complex unit(double angle) { return std::polar(1.0, angle); }

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

}  // namespace exclab
