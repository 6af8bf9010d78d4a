#include "exclab/kernels.hpp"

#include <cmath>

namespace exclab {

namespace {

constexpr double kSeriesTol = 1e-12;
constexpr int kMaxModes = 100000;

void require_closed_disk(Complex z, const char* what) {
  if (!(std::abs(z) <= 1.0 + kBoundaryTol)) {
    throw Error(ErrorCode::domain, std::string(what) + " lies outside the closed unit disk");
  }
}

void require_interior(Complex z, const char* what) {
  require_closed_disk(z, what);
  if (std::abs(z) >= 1.0 - kBoundaryTol) {
    throw Error(ErrorCode::domain, std::string(what) + " must be strictly inside the disk");
  }
}

void require_boundary(Complex z, const char* what) {
  if (std::abs(std::abs(z) - 1.0) > kBoundaryTol) {
    throw Error(ErrorCode::domain, std::string(what) + " must lie on the unit circle");
  }
}

void require_distinct(Complex x, Complex y) {
  if (std::abs(x - y) < kCoincidentTol) {
    throw Error(ErrorCode::coincident_points, "kernel arguments coincide");
  }
}

void require_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::domain, "annulus radius must be in (0,1)");
  if (rho > kMaxAnnulusRho) {
    throw Error(ErrorCode::nonconvergence, "annulus series not supported for rho > 0.95");
  }
}

// Sum of a_k cos(k psi) with |a_k| <= c k q^k; stops once the remaining tail
// bound drops below kSeriesTol relative to `scale`.
template <class Coef>
double cosine_series(double psi, double q, double scale, Coef coef) {
  double sum = 0.0;
  for (int k = 1; k <= kMaxModes; ++k) {
    const double a = coef(k);
    sum += a * std::cos(k * psi);
    // k q^k / (1-q)^2 bounds the tail of j q^j beyond k.
    const double tail = (k + 1) * std::pow(q, k + 1) / ((1.0 - q) * (1.0 - q));
    if (std::abs(a) == 0.0 || tail * 4.0 / (1.0 - q) < kSeriesTol * scale) return sum;
  }
  throw Error(ErrorCode::nonconvergence, "Fourier series did not reach the tail bound");
}

double angle_between(Complex x, Complex y) { return std::arg(y / x); }

}  // namespace

double green_disk(Complex x, Complex y) {
  require_closed_disk(x, "x");
  require_closed_disk(y, "y");
  require_distinct(x, y);
  return std::log(std::abs(1.0 - std::conj(x) * y) / std::abs(x - y)) / kPi;
}

double harmonic_density_disk(Complex x, Complex y) {
  require_interior(x, "x");
  require_boundary(y, "y");
  return (1.0 - std::norm(x)) / (kTwoPi * std::norm(x - y));
}

double boundary_kernel_disk(Complex x, Complex y) {
  require_boundary(x, "x");
  require_boundary(y, "y");
  require_distinct(x, y);
  return 1.0 / (kPi * std::norm(x - y));
}

double rect_boundary_kernel(double l, double y1, double y2) {
  if (!(l > 0.0)) throw Error(ErrorCode::domain, "rectangle half-length must be positive");
  if (!(y1 > 0.0 && y1 < kPi && y2 > 0.0 && y2 < kPi)) {
    throw Error(ErrorCode::domain, "heights must lie in (0, pi)");
  }
  const double q = std::exp(-2.0 * l);
  const double lead = 2.0 / (kPi * std::sinh(2.0 * l));
  double sum = 0.0;
  for (int k = 1; k <= kMaxModes; ++k) {
    sum += 2.0 / kPi * k * std::sin(k * y1) * std::sin(k * y2) / std::sinh(2.0 * k * l);
    // 1/sinh(2kl) <= 2 q^k / (1 - q^2)
    const double tail = 4.0 / kPi * (k + 1) * std::pow(q, k + 1) / ((1.0 - q * q) * (1.0 - q) * (1.0 - q));
    if (tail < kSeriesTol * lead) return sum;
  }
  throw Error(ErrorCode::nonconvergence, "rectangle series did not reach the tail bound");
}

double rect_right_exit_probability(double l, double x, double y) {
  if (!(l > 0.0)) throw Error(ErrorCode::domain, "rectangle half-length must be positive");
  if (!(std::abs(x) < l && y > 0.0 && y < kPi)) throw Error(ErrorCode::domain, "point outside rectangle");
  double sum = 0.0;
  for (int k = 1; k <= kMaxModes; k += 2) {
    // sinh(k(x+l))/sinh(2kl) without overflow
    const double ratio = std::exp(k * (x - l)) * (1.0 - std::exp(-2.0 * k * (x + l))) /
                         (1.0 - std::exp(-4.0 * k * l));
    const double term = 4.0 / (kPi * k) * std::sin(k * y) * ratio;
    sum += term;
    if (std::exp(k * (x - l)) / k < 1e-15 && k > 1) return sum;
  }
  throw Error(ErrorCode::nonconvergence, "exit-probability series did not converge");
}

double annulus_boundary_kernel(double rho, Complex x, Complex xp) {
  require_rho(rho);
  require_boundary(x, "x");
  if (std::abs(std::abs(xp) - rho) > kBoundaryTol) {
    throw Error(ErrorCode::domain, "xp must lie on the inner circle");
  }
  const double psi = angle_between(x, xp);
  const double base = 1.0 / std::log(1.0 / rho);
  const double s = cosine_series(psi, rho, base, [rho](int k) {
    const double rk = std::pow(rho, k);
    return 4.0 * k * rk / (1.0 - rk * rk);
  });
  return (base + s) / (kTwoPi * rho);
}

AnnulusKernel::AnnulusKernel(double rho) : rho_(rho) {
  require_rho(rho);
  base_ = 1.0 / std::log(1.0 / rho);
  // same coefficients and stopping rule as annulus_boundary_kernel
  cosine_series(0.0, rho, base_, [&](int k) {
    const double rk = std::pow(rho, k);
    coef_.push_back(4.0 * k * rk / (1.0 - rk * rk));
    return coef_.back();
  });
}

double AnnulusKernel::operator()(Complex x, Complex xp) const {
  const double c = std::cos(angle_between(x, xp));
  // Clenshaw recurrence for sum_k coef_k cos(k psi)
  double b1 = 0.0, b2 = 0.0;
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) {
    const double b0 = *it + 2.0 * c * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (base_ + b1 * c - b2) / (kTwoPi * rho_);
}

double excess_kernel(double rho, Complex x, Complex y) {
  require_rho(rho);
  require_boundary(x, "x");
  require_boundary(y, "y");
  require_distinct(x, y);
  const double psi = angle_between(x, y);
  const double base = 1.0 / std::log(1.0 / rho);
  const double q = rho * rho;
  const double s = cosine_series(psi, q, base, [q](int k) {
    const double qk = std::pow(q, k);
    return 4.0 * k * qk / (1.0 - qk);
  });
  return (base + s) / kTwoPi;
}

double annulus_outer_kernel(double rho, Complex x, Complex y) {
  return boundary_kernel_disk(x, y) - excess_kernel(rho, x, y);
}

double hit_probability(double rho, Complex x, Complex y) {
  return excess_kernel(rho, x, y) / boundary_kernel_disk(x, y);
}

int annulus_mode_count(double rho) {
  require_rho(rho);
  int k = 1;
  while ((k + 1) * std::pow(rho, k + 1) * 4.0 / std::pow(1.0 - rho, 3) >= kSeriesTol / std::log(1.0 / rho)) ++k;
  return k;
}

}  // namespace exclab
