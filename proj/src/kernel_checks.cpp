#include "exclab/kernel_checks.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "exclab/kernels.hpp"
#include "exclab/mc.hpp"
#include "exclab/rng.hpp"

namespace exclab {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

// z -> e^{i t} (z - a) / (1 - conj(a) z) and |phi'(z)|
struct Mobius {
  Complex a;
  double t;
  Complex operator()(Complex z) const { return unit(t) * (z - a) / (1.0 - std::conj(a) * z); }
  double deriv(Complex z) const { return (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z); }
};

Complex interior(Rng& rng, double rmax) { return std::polar(rmax * std::sqrt(rng.uniform()), kTwoPi * rng.uniform()); }

}  // namespace

std::vector<InvariantCheck> disk_kernel_suite(double tolerance, std::uint64_t seed) {
  Rng rng(seed);
  const int trials = 200;
  double g_sym = 0, g_mob = 0, h_norm = 0, h_mob = 0, k_sym = 0, k_mob = 0, g_mass = 0, g_bdry = 0;
  for (int i = 0; i < trials; ++i) {
    const Complex x = interior(rng, 0.9), y = interior(rng, 0.9);
    const Complex bx = unit(kTwoPi * rng.uniform()), by = unit(kTwoPi * rng.uniform());
    const Mobius f{interior(rng, 0.9), kTwoPi * rng.uniform()};
    const double g = green_disk(x, y);
    g_sym = std::max(g_sym, std::abs(g - green_disk(y, x)));
    g_mob = std::max(g_mob, std::abs(green_disk(f(x), f(y)) - g));
    g_bdry = std::max(g_bdry, std::abs(green_disk(x, bx)));
    const double h = harmonic_density_disk(x, by);
    h_mob = std::max(h_mob, std::abs(harmonic_density_disk(f(x), f(by)) * f.deriv(by) / h - 1.0));
    const double k = boundary_kernel_disk(bx, by);
    k_sym = std::max(k_sym, std::abs(k / boundary_kernel_disk(by, bx) - 1.0));
    k_mob = std::max(k_mob, std::abs(boundary_kernel_disk(f(bx), f(by)) * f.deriv(bx) * f.deriv(by) / k - 1.0));
  }
  for (int i = 0; i < 10; ++i) {
    const Complex x = interior(rng, 0.9);
    const double total = Quad::integrate([&](double t) { return harmonic_density_disk(x, unit(t)); }, 0.0, kTwoPi, 15, 1e-13);
    h_norm = std::max(h_norm, std::abs(total - 1.0));
  }
  for (int i = 0; i < 3; ++i) {
    // total occupation before exit, E_x[tau] = (1 - |x|^2) / 2
    const Complex x = interior(rng, 0.7);
    const double total = Quad::integrate(
        [&](double t) {
          const Complex u = unit(t);
          const double b = dot(x, u);
          const double reach = -b + std::sqrt(b * b + 1.0 - std::norm(x));
          return Quad::integrate([&](double r) { return r < 1e-14 ? 0.0 : r * green_disk(x, x + r * u); }, 0.0,
                                 reach * (1.0 - 1e-15), 15, 1e-13);
        },
        0.0, kTwoPi, 15, 1e-13);
    g_mass = std::max(g_mass, std::abs(total - 0.5 * (1.0 - std::norm(x))));
  }
  return {{"green symmetry", g_sym, tolerance},
          {"green vanishes on the boundary", g_bdry, tolerance},
          {"green total mass equals mean exit time", g_mass, tolerance},
          {"green Mobius invariance", g_mob, tolerance},
          {"harmonic measure normalization", h_norm, tolerance},
          {"harmonic density Mobius covariance", h_mob, tolerance},
          {"boundary kernel symmetry", k_sym, tolerance},
          {"boundary kernel Mobius covariance", k_mob, tolerance}};
}

std::vector<InvariantCheck> rect_kernel_suite(double l, double tolerance) {
  double ratio_err = 0, fact_err = 0;
  const double c = rect_boundary_kernel(l, kPi / 2, kPi / 2);
  for (int i = 1; i < 10; ++i) {
    for (int j = 1; j < 10; ++j) {
      const double y1 = i * kPi / 10, y2 = j * kPi / 10;
      const double k = rect_boundary_kernel(l, y1, y2);
      ratio_err = std::max(ratio_err, std::abs(rect_boundary_kernel(l + 1.0, y1, y2) / k - std::exp(-2.0)));
      fact_err = std::max(fact_err, std::abs(k / (c * std::sin(y1) * std::sin(y2)) - 1.0));
    }
  }
  return {{"rectangle kernel ratio K(l+1)/K(l) = e^-2", ratio_err, tolerance},
          {"compensated rectangle kernel factorizes as sin(y1) sin(y2)", fact_err, tolerance}};
}

std::vector<InvariantCheck> wos_oracle_suite(std::uint64_t walks, std::uint64_t seed, int workers) {
  const Complex x(0.3, 0.2);
  std::vector<InvariantCheck> out;
  const double rings[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int k = 0; k < 4; ++k) {
    const double r0 = rings[k], r1 = rings[k + 1];
    // polar integral of G(x, .) over the ring, split at |x| where G is singular
    auto radial = [&](double r) {
      if (r == 0.0) return 0.0;
      auto ang = [&](double t) {
        const Complex z = std::polar(r, t);
        return std::abs(z - x) < 1e-14 ? 0.0 : green_disk(x, z);
      };
      return r * Quad::integrate(ang, 0.0, kTwoPi, 15, 1e-12);
    };
    const double rx = std::abs(x);
    double exact;
    if (rx > r0 && rx < r1) {
      exact = Quad::integrate(radial, r0, rx, 15, 1e-11) + Quad::integrate(radial, rx, r1, 15, 1e-11);
    } else {
      exact = Quad::integrate(radial, r0, r1, 15, 1e-11);
    }
    const WosResult w = wos_ring_occupation(x, r0, r1, walks, derive_seed(seed, k, 1), workers);
    out.push_back({"walk-on-spheres occupation of ring " + std::to_string(k), std::abs(w.mean - exact) / w.std_error, 3.0});
  }
  const int bins = 8;
  const auto counts = wos_exit_histogram(x, bins, walks, derive_seed(seed, 0, 2), workers);
  for (int b = 0; b < bins; ++b) {
    const double p = Quad::integrate([&](double t) { return harmonic_density_disk(x, unit(t)); }, b * kTwoPi / bins,
                                     (b + 1) * kTwoPi / bins, 15, 1e-13);
    const double n = static_cast<double>(walks);
    const double z = (static_cast<double>(counts[b]) - n * p) / std::sqrt(n * p * (1.0 - p));
    out.push_back({"walk-on-spheres exit frequency of arc " + std::to_string(b), std::abs(z), 3.0});
  }
  return out;
}

}  // namespace exclab
