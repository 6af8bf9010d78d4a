#pragma once

#include <cstddef>

#include "exclab/common.hpp"
#include "exclab/path.hpp"
#include "exclab/rng.hpp"

namespace exclab {

struct ExcursionOptions {
  /// Squared step length in the disk.
  double dt = 1e-4;
  /// Circle |z| = target_radius whose crossings should be resolved; 0 for none.
  double target_radius = 0.0;
  /// Near the target circle the disk step shrinks to refine_kappa times the
  /// distance to it, but not below sqrt(refine_floor * dt).
  bool refine = true;
  double refine_kappa = 0.25;
  double refine_floor = 1e-4;
  /// Far from the target disk steps grow to kappa times the distance to it,
  /// and sampling stops once a return has probability below stop_bound.
  bool accelerate = false;
  double kappa = 0.25;
  double stop_bound = 1e-7;
  std::size_t max_steps = 200'000'000;
};

/// Conformal map between the upper half-plane and the disk sending 0 to x
/// and infinity to y.
class HalfPlaneChart {
 public:
  HalfPlaneChart(Complex x, Complex y);
  Complex to_disk(Complex w) const;
  Complex from_disk(Complex z) const;
  /// |d to_disk / dw|
  double derivative(Complex w) const;
  /// Point of the lower half-plane sent to infinity.
  Complex pole() const { return rot_; }

 private:
  Complex x_, y_, rot_;
};

/// Samples the trace of a Brownian excursion in the unit disk from x to y,
/// streaming its points into `sink`.
void sample_excursion_disk(Complex x, Complex y, const ExcursionOptions& opt, Rng& rng, PathSink& sink);
PolyPath sample_excursion_disk(Complex x, Complex y, double dt, Rng& rng);

struct BridgeOptions {
  double dt = 1e-4;
  /// Durations are drawn from (0, t_max]; the disk bridge mass beyond is below e^{-28}.
  double t_max = 10.0;
  std::size_t max_attempts = 100000;
};

struct BridgeStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
};

/// Brownian bridge from x to y conditioned to stay in the unit disk, by
/// rejection of free bridges.
PolyPath sample_bridge_disk(Complex x, Complex y, const BridgeOptions& opt, Rng& rng, BridgeStats* stats = nullptr);

/// Duration of a free planar bridge with |x-y|^2 = 2s, drawn from the
/// heat-kernel weight restricted to (0, t_max].
double sample_bridge_duration(double s, double t_max, Rng& rng);

/// Probability that one free bridge attempt stays in the disk, 2π G(x,y) / E1(s / t_max).
double bridge_acceptance_rate(Complex x, Complex y, double t_max);

}  // namespace exclab
