#pragma once

#include <vector>

#include "exclab/common.hpp"

namespace exclab {

// Kernels for Brownian motion with generator (1/2)Δ, so that G(x, .) is the
// density of expected occupation time and the disk exit time from 0 has mean 1/2.
// Boundary kernels are densities with respect to arclength.

/// Green's function of the unit disk, (1/π) log(|1 - conj(x) y| / |x - y|).
double green_disk(Complex x, Complex y);

/// Density at boundary point y of harmonic measure from interior x.
double harmonic_density_disk(Complex x, Complex y);

/// Boundary Poisson kernel of the disk, 1 / (π |x - y|²).
double boundary_kernel_disk(Complex x, Complex y);

/// Boundary Poisson kernel between the two vertical ends of the rectangle
/// (-l, l) x (0, π), at heights y1 (left) and y2 (right).
double rect_boundary_kernel(double l, double y1, double y2);

/// Probability that Brownian motion from (x, y) in the same rectangle exits
/// through the right end.
double rect_right_exit_probability(double l, double x, double y);

/// Largest inner radius for which the annulus series are evaluated.
inline constexpr double kMaxAnnulusRho = 0.95;

/// Boundary Poisson kernel of the annulus rho < |z| < 1 between x on the
/// outer circle and xp on the inner circle.
double annulus_boundary_kernel(double rho, Complex x, Complex xp);

/// annulus_boundary_kernel at a fixed radius with the Fourier coefficients
/// computed once; for repeated evaluation inside quadratures.
class AnnulusKernel {
 public:
  explicit AnnulusKernel(double rho);
  double operator()(Complex x, Complex xp) const;
  double rho() const { return rho_; }

 private:
  double rho_, base_;
  std::vector<double> coef_;
};

/// Boundary Poisson kernel of the same annulus between two outer points.
double annulus_outer_kernel(double rho, Complex x, Complex y);

/// Mass of the disk excursions from x to y that reach the closed disk of
/// radius rho: boundary_kernel_disk - annulus_outer_kernel.
double excess_kernel(double rho, Complex x, Complex y);

/// Probability that the excursion from x to y reaches |z| <= rho.
double hit_probability(double rho, Complex x, Complex y);

/// Number of Fourier modes the annulus series use at this radius.
int annulus_mode_count(double rho);

}  // namespace exclab
