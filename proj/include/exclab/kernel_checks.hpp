#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace exclab {

struct InvariantCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

/// Symmetry, normalization and Möbius (co)variance of green_disk,
/// harmonic_density_disk and boundary_kernel_disk at random points.
std::vector<InvariantCheck> disk_kernel_suite(double tolerance = 1e-8, std::uint64_t seed = 1);

/// Decay of rect_boundary_kernel by e^{-2} per unit length at l and the
/// sin(y1) sin(y2) factorization of e^{2l} K on a 9 x 9 grid.
std::vector<InvariantCheck> rect_kernel_suite(double l = 8.0, double tolerance = 1e-6);

/// Walk-on-spheres oracles with `walks` walks each: ring occupation from an
/// interior point against the integral of green_disk, and exit-arc
/// frequencies against the integral of harmonic_density_disk. Errors are
/// |z|-scores, tolerance 3.
std::vector<InvariantCheck> wos_oracle_suite(std::uint64_t walks, std::uint64_t seed, int workers);

}  // namespace exclab
