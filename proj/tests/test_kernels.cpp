#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "exclab/kernels.hpp"
#include "exclab/rng.hpp"

using namespace exclab;

namespace {

Complex random_interior(std::mt19937_64& g, double rmax = 0.95) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(g)), kTwoPi * u(g));
}

// Disk automorphism z -> e^{i t} (z - a) / (1 - conj(a) z).
struct Mobius {
  Complex a;
  double t;
  Complex operator()(Complex z) const { return unit(t) * (z - a) / (1.0 - std::conj(a) * z); }
  double deriv(Complex z) const { return (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z); }
};

double integrate(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("green_disk symmetry, boundary limit and errors") {
  std::mt19937_64 g(1);
  for (int i = 0; i < 100; ++i) {
    const Complex x = random_interior(g), y = random_interior(g);
    CHECK(green_disk(x, y) == doctest::Approx(green_disk(y, x)).epsilon(1e-13));
    CHECK(green_disk(x, y) > 0.0);
  }
  CHECK(green_disk(0.0, Complex(0.0, 1.0 - 1e-9)) < 1e-8);
  CHECK_THROWS_AS(green_disk(0.3, 0.3), Error);
  CHECK_THROWS_AS(green_disk(0.3, 1.5), Error);
}

TEST_CASE("green_disk integrates to the expected exit time") {
  // E_x[tau] = (1 - |x|^2) / 2 for generator (1/2) Laplacian.
  const Complex x(0.3, 0.2);
  const double total = integrate(
      [&](double t) {
        const Complex u = unit(t);
        // distance from x to the unit circle along direction u
        const double b = dot(x, u);
        const double reach = -b + std::sqrt(b * b + 1.0 - std::norm(x));
        return integrate([&](double r) { return r < 1e-14 ? 0.0 : r * green_disk(x, x + r * u); }, 0.0,
                         reach * (1.0 - 1e-15));
      },
      0.0, kTwoPi);
  CHECK(total == doctest::Approx((1.0 - std::norm(x)) / 2.0).epsilon(1e-9));
}

TEST_CASE("green_disk is invariant under disk automorphisms") {
  std::mt19937_64 g(2);
  for (int i = 0; i < 20; ++i) {
    const Mobius f{random_interior(g, 0.9), kTwoPi * std::uniform_real_distribution<double>(0, 1)(g)};
    const Complex x = random_interior(g, 0.9), y = random_interior(g, 0.9);
    CHECK(std::abs(green_disk(f(x), f(y)) - green_disk(x, y)) < 1e-10);
  }
}

TEST_CASE("harmonic_density_disk") {
  for (int k = 0; k < 12; ++k) CHECK(harmonic_density_disk(0.0, unit(0.5 * k)) == doctest::Approx(1.0 / kTwoPi));
  for (Complex x : {Complex(0.5, 0.0), Complex(-0.2, 0.7), Complex(0.0, -0.9)}) {
    const double total = integrate([&](double t) { return harmonic_density_disk(x, unit(t)); }, 0.0, kTwoPi);
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(harmonic_density_disk(1.0, -1.0), Error);
  CHECK_THROWS_AS(harmonic_density_disk(0.2, 0.5), Error);
}

TEST_CASE("boundary_kernel_disk scaling, limit and covariance") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const Complex x = unit(ang(g)), y = unit(ang(g));
    CHECK(std::abs(boundary_kernel_disk(x, y) * std::norm(x - y) - 1.0 / kPi) < 1e-12);
    CHECK(boundary_kernel_disk(x, y) / (1.0 / (4.0 * std::norm(x - y))) == doctest::Approx(4.0 / kPi).epsilon(1e-12));
  }
  // Richardson extrapolation of eps^{-1} H(1 - eps, -1).
  auto q = [](double e) { return harmonic_density_disk(1.0 - e, -1.0) / e; };
  double h = 1e-2;
  const double r1 = 2 * q(h / 2) - q(h);
  const double r2 = 2 * q(h / 4) - q(h / 2);
  const double rich = (4 * r2 - r1) / 3;
  CHECK(std::abs(rich - boundary_kernel_disk(1.0, -1.0)) < 1e-6);

  for (int i = 0; i < 20; ++i) {
    const Mobius f{random_interior(g, 0.9), ang(g)};
    const Complex x = unit(ang(g)), y = unit(ang(g));
    const double lhs = boundary_kernel_disk(f(x), f(y)) * f.deriv(x) * f.deriv(y);
    CHECK(std::abs(lhs / boundary_kernel_disk(x, y) - 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(boundary_kernel_disk(1.0, 1.0), Error);
}

TEST_CASE("rect_boundary_kernel") {
  CHECK(rect_boundary_kernel(3.0, 0.4, 1.9) == doctest::Approx(rect_boundary_kernel(3.0, 1.9, 0.4)).epsilon(1e-14));
  const double ratio = rect_boundary_kernel(9.0, 1.1, 2.0) / rect_boundary_kernel(8.0, 1.1, 2.0);
  CHECK(std::abs(ratio - std::exp(-2.0)) < 1e-6);
  // Leading-mode factorization on a grid.
  const double l = 8.0;
  const double c = rect_boundary_kernel(l, kPi / 2, kPi / 2);
  for (int i = 1; i < 10; ++i) {
    for (int j = 1; j < 10; ++j) {
      const double y1 = i * kPi / 10, y2 = j * kPi / 10;
      CHECK(std::abs(rect_boundary_kernel(l, y1, y2) / (c * std::sin(y1) * std::sin(y2)) - 1.0) < 1e-6);
    }
  }
  // The normal derivative of the exit probability at the left end integrates the kernel.
  const double y1 = 1.3, e = 1e-5;
  const double dp = rect_right_exit_probability(2.0, -2.0 + e, y1) / e;
  const double mass = integrate([&](double y2) { return rect_boundary_kernel(2.0, y1, y2); }, 0.0, kPi);
  CHECK(dp == doctest::Approx(mass).epsilon(1e-4));
  // Center of a square leaves through each side with probability 1/4.
  CHECK(rect_right_exit_probability(kPi / 2, 0.0, kPi / 2) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_THROWS_AS(rect_boundary_kernel(2.0, 0.0, 1.0), Error);
}

TEST_CASE("annulus kernels") {
  const double rho = 0.4;
  for (double t : {0.0, 0.7, 2.5}) {
    CHECK(annulus_boundary_kernel(rho, unit(0.3 + t), rho * unit(1.2 + t)) ==
          doctest::Approx(annulus_boundary_kernel(rho, unit(0.3), rho * unit(1.2))).epsilon(1e-12));
  }
  // Mass of excursions from x reaching the inner circle: d/dn of log|z|/log(rho).
  const double mass = integrate([&](double t) { return rho * annulus_boundary_kernel(rho, 1.0, rho * unit(t)); },
                                -kPi, kPi);
  CHECK(mass == doctest::Approx(1.0 / std::log(1.0 / rho)).epsilon(1e-10));
  // Symmetric in its outer arguments and bounded by the disk kernel.
  const Complex x = unit(0.2), y = unit(2.9);
  CHECK(annulus_outer_kernel(rho, x, y) == doctest::Approx(annulus_outer_kernel(rho, y, x)).epsilon(1e-12));
  CHECK(annulus_outer_kernel(rho, x, y) > 0.0);
  CHECK(excess_kernel(rho, x, y) > 0.0);
  CHECK(hit_probability(rho, x, y) < 1.0);
  CHECK(hit_probability(0.5, 1.0, -1.0) > 0.9998);
  CHECK_THROWS_AS(annulus_boundary_kernel(0.97, 1.0, 0.97), Error);
  CHECK(annulus_mode_count(0.95) > annulus_mode_count(0.5));
}

TEST_CASE("annulus kernel flattens as the inner circle shrinks") {
  // Relative angular spread is about 8 rho log(1/rho); it vanishes with rho
  // but is far from negligible at rho = 0.01.
  for (double rho : {0.1, 0.01, 0.001}) {
    const double hi = annulus_boundary_kernel(rho, 1.0, rho);
    const double lo = annulus_boundary_kernel(rho, 1.0, -rho);
    const double spread = (hi - lo) / (0.5 * (hi + lo));
    const double predicted = 8.0 * rho * std::log(1.0 / rho);
    CHECK(spread == doctest::Approx(predicted).epsilon(0.1 + 3 * rho));
  }
}

TEST_CASE("excess kernel equals the first/last-visit decomposition") {
  // K - K^A = (1/2) double integral of K^A(x,x') G(x',y') K^A(y',y) over the inner circle.
  for (double rho : {0.3, 0.6}) {
    const Complex x = unit(0.1), y = unit(2.4);
    // Outer integrand is smooth and periodic: trapezoid rule. Inner halves
    // use s = t +- pi v^2 to tame the logarithmic singularity at s = t.
    const int nt = 96;
    double total = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double t = kTwoPi * i / nt;
      const Complex xp = rho * unit(t);
      double g = 0.0;
      for (double sign : {-1.0, 1.0}) {
        g += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double v) {
              if (v < 1e-4) return 0.0;
              const Complex yp = rho * unit(t + sign * kPi * v * v);
              return 2.0 * kPi * v * green_disk(xp, yp) * annulus_boundary_kernel(rho, y, yp);
            },
            0.0, 1.0, 8, 1e-12);
      }
      total += annulus_boundary_kernel(rho, x, xp) * g * rho * rho * kTwoPi / nt;
    }
    CHECK(0.5 * total == doctest::Approx(excess_kernel(rho, x, y)).epsilon(1e-6));
  }
}
