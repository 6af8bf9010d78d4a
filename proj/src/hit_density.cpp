#include "exclab/hit_density.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "exclab/kernels.hpp"

namespace exclab {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kInnerTol = 1e-10;
constexpr double kOuterTol = 1e-8;

// G(rho e^{it}, rho e^{is}) from the angle difference, accurate as s -> t.
double green_on_circle(double rho, double d) {
  const double chord = 2.0 * rho * std::abs(std::sin(0.5 * d));
  if (chord == 0.0) return 0.0;
  return std::log(std::abs(1.0 - rho * rho * std::polar(1.0, d)) / chord) / kPi;
}

}  // namespace

HitDensity::HitDensity(Complex x, Complex y, double rho) : x_(x), y_(y), rho_(rho), ka_(rho) {
  // Total mass of the product kernel is twice the excess kernel.
  norm_ = 2.0 * excess_kernel(rho, x, y);
}

double HitDensity::raw(double t, double s) const {
  return ka_(x_, std::polar(rho_, t)) * green_on_circle(rho_, s - t) * ka_(y_, std::polar(rho_, s)) * rho_ * rho_;
}

double HitDensity::density(double t, double s) const { return raw(t, s) / norm_; }

double HitDensity::inner(double t, double s0, double s1) const {
  auto f = [&](double s) { return green_on_circle(rho_, s - t) * ka_(y_, std::polar(rho_, s)); };
  // split at the logarithmic singularity s = t (mod 2π)
  std::vector<double> cuts{s0};
  for (int k = -2; k <= 2; ++k) {
    const double c = t + k * kTwoPi;
    if (c > s0 && c < s1) cuts.push_back(c);
  }
  cuts.push_back(s1);
  double total = 0.0;
  // tanh-sinh copes with the endpoint singularity
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += ts.integrate(f, cuts[i], cuts[i + 1], kInnerTol);
  return total;
}

double HitDensity::box_mass(double t0, double t1, double s0, double s1) const {
  auto f = [&](double t) { return ka_(x_, std::polar(rho_, t)) * inner(t, s0, s1); };
  return Quad::integrate(f, t0, t1, 10, kOuterTol) * rho_ * rho_ / norm_;
}

void HitDensity::build_table(int grid) {
  grid_ = grid;
  const double h = kTwoPi / grid;
  cdf_.assign(static_cast<std::size_t>(grid) * grid, 0.0);
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const int dist = std::min(std::abs(i - j), grid - std::abs(i - j));
      double m;
      if (dist <= 1) {
        auto f = [&](double t) { return ka_(x_, std::polar(rho_, t)) * inner(t, j * h, (j + 1) * h); };
        m = boost::math::quadrature::gauss<double, 8>::integrate(f, i * h, (i + 1) * h) * rho_ * rho_ / norm_;
      } else {
        m = 0.0;
        for (double a : {0.25, 0.75}) {
          for (double b : {0.25, 0.75}) m += raw((i + a) * h, (j + b) * h);
        }
        m *= 0.25 * h * h / norm_;
      }
      acc += m;
      cdf_[static_cast<std::size_t>(i) * grid + j] = acc;
    }
  }
  for (double& c : cdf_) c /= acc;
}

std::pair<double, double> HitDensity::sample(Rng& rng) const {
  if (grid_ == 0) throw Error(ErrorCode::domain, "hit density table not built");
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const auto cell = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  const double h = kTwoPi / grid_;
  const double t = (static_cast<double>(cell / grid_) + rng.uniform()) * h;
  const double s = (static_cast<double>(cell % grid_) + rng.uniform()) * h;
  return {t, s};
}

}  // namespace exclab
