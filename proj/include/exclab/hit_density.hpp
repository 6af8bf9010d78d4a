#pragma once

#include <vector>

#include "exclab/common.hpp"
#include "exclab/kernels.hpp"
#include "exclab/rng.hpp"

namespace exclab {

/// Law of the first and last points (x', y') = (rho e^{i t}, rho e^{i s}) on
/// the circle of radius rho of an excursion from x to y that reaches it.
/// Density in (t, s) proportional to K^A(x, x') G(x', y') K^A(y', y).
class HitDensity {
 public:
  HitDensity(Complex x, Complex y, double rho);

  double rho() const { return rho_; }
  /// Normalized density in (t, s).
  double density(double t, double s) const;
  /// Probability of the box [t0, t1] x [s0, s1] (angles in any range, t1 - t0 <= 2π).
  double box_mass(double t0, double t1, double s0, double s1) const;

  /// Draws (t, s) from a tabulated version of the density with `grid` cells
  /// per angle. The table is built on first use.
  std::pair<double, double> sample(Rng& rng) const;
  void build_table(int grid = 256);

 private:
  double raw(double t, double s) const;
  double inner(double t, double s0, double s1) const;

  Complex x_, y_;
  double rho_;
  AnnulusKernel ka_;
  double norm_;
  int grid_ = 0;
  std::vector<double> cdf_;
};

}  // namespace exclab
