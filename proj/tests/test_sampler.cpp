#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "exclab/kernels.hpp"
#include "exclab/path.hpp"
#include "exclab/sampler.hpp"

using namespace exclab;

namespace {

// Stops the sampler as soon as the path reaches the disk of radius r.
class HitSink : public PathSink {
 public:
  explicit HitSink(double r) : r_(r) {}
  bool push(Complex z) override {
    if (has_prev_ && !segment_circle_params(prev_, z, r_).empty()) hit = true;
    if (std::abs(z) <= r_) hit = true;
    prev_ = z;
    has_prev_ = true;
    return !hit;
  }
  void jump(Complex) override {}
  bool hit = false;

 private:
  double r_;
  Complex prev_{};
  bool has_prev_ = false;
};

double hit_fraction(Complex x, Complex y, double r, int n, std::uint64_t seed) {
  ExcursionOptions opt;
  opt.target_radius = r;
  opt.accelerate = true;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::for_stream(seed, i);
    HitSink sink(r);
    sample_excursion_disk(x, y, opt, rng, sink);
    hits += sink.hit;
  }
  return static_cast<double>(hits) / n;
}

double chi2_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) stat += std::pow(observed[i] - expected[i], 2) / expected[i];
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("half-plane chart sends 0 and infinity to the endpoints") {
  const Complex x = unit(0.3), y = unit(2.5);
  HalfPlaneChart chart(x, y);
  CHECK(std::abs(chart.to_disk(0.0) - x) < 1e-12);
  CHECK(std::abs(chart.to_disk(Complex(1e9, 1.0)) - y) < 1e-8);
  for (Complex w : {Complex(0.3, 0.7), Complex(-2.0, 0.1), Complex(5.0, 3.0)}) {
    const Complex z = chart.to_disk(w);
    CHECK(std::abs(z) < 1.0);
    CHECK(std::abs(chart.from_disk(z) - w) < 1e-10 * (1.0 + std::abs(w)));
    const double h = 1e-6;
    const double fd = std::abs(chart.to_disk(w + h) - chart.to_disk(w - h)) / (2 * h);
    CHECK(chart.derivative(w) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(std::abs(chart.to_disk(Complex(7.0, 0.0))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("excursion endpoints, interior points and spacing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const Complex x = unit(0.1 * seed), y = unit(2.0 + 0.5 * seed);
    const double dt = 1e-4;
    const PolyPath p = sample_excursion_disk(x, y, dt, rng);
    REQUIRE(p.points.size() >= 2);
    CHECK(std::abs(p.points.front() - x) < 1e-9);
    CHECK(std::abs(p.points.back() - y) < 1e-9);
    for (std::size_t i = 1; i + 1 < p.points.size(); ++i) REQUIRE(std::abs(p.points[i]) < 1.0);
    CHECK(p.max_spacing() <= 8.0 * std::sqrt(dt));
  }
  Rng rng(3);
  CHECK_THROWS_AS(sample_excursion_disk(unit(1.0), unit(1.0 + 1e-8), 1e-4, rng), Error);
}

TEST_CASE("excursion hit probability matches the kernel ratio") {
  const double rho = 0.5;
  const Complex x = unit(0.0), y = unit(kPi);
  const double exact = hit_probability(rho, x, y);
  const int n = 20000;
  const double p = hit_fraction(x, y, rho, n, 11);
  const double se = std::sqrt(exact * (1 - exact) / n);
  CHECK(std::abs(p - exact) < 3 * se);
}

TEST_CASE("hit probability is rotation invariant") {
  const double rho = 0.5;
  const int n = 4000;
  std::vector<double> ps;
  double pooled = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double th = k * kTwoPi / 8 + 0.1;
    ps.push_back(hit_fraction(unit(th), unit(th + kPi), rho, n, 100 + k));
    pooled += ps.back() / 8;
  }
  const double se = std::sqrt(pooled * (1 - pooled) / n);
  for (double p : ps) CHECK(std::abs(p - pooled) < 3 * se);
}

TEST_CASE("first and last hit of a straight path") {
  PolyPath p;
  for (int k = 0; k <= 20; ++k) p.points.push_back(unit(0.4) * (-1.0 + 0.1 * k));
  const HitRecord rec = first_last_hit(p, 0.37);
  REQUIRE(rec.hit);
  CHECK(std::abs(rec.x_first - (-0.63) * unit(0.4)) < 1e-12);
  CHECK(std::abs(rec.y_last - 0.63 * unit(0.4)) < 1e-12);

  PolyPath ring;
  for (int k = 0; k <= 50; ++k) ring.points.push_back(0.8 * unit(k * 0.1));
  CHECK_FALSE(first_last_hit(ring, 0.5).hit);

  const auto ts = segment_circle_params(-1.0, 1.0, 0.5);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ts[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("bridge endpoints and errors") {
  Rng rng(5);
  const Complex x(-0.3, 0.1), y(0.2, -0.4);
  const PolyPath p = sample_bridge_disk(x, y, {}, rng);
  CHECK(p.points.front() == x);
  CHECK(p.points.back() == y);
  CHECK(p.kind == PathKind::bridge);
  for (const Complex& z : p.points) REQUIRE(std::abs(z) < 1.0);
  BridgeOptions coarse;
  coarse.dt = 1e-2;
  CHECK_THROWS_AS(sample_bridge_disk(x, y, coarse, rng), Error);
  CHECK_THROWS_AS(sample_bridge_disk(x, x, {}, rng), Error);
  BridgeOptions tight;
  tight.max_attempts = 1;
  bool budget_error = false;
  for (int k = 0; k < 20 && !budget_error; ++k) {
    try {
      sample_bridge_disk(Complex(0.99, 0.0), Complex(-0.99, 0.0), tight, rng);
    } catch (const Error& e) {
      budget_error = e.code() == ErrorCode::rejection_budget;
    }
  }
  CHECK(budget_error);
}

TEST_CASE("bridge duration law") {
  // u = s/T has density proportional to e^{-u}/u on [s/t_max, inf).
  const double s = 0.05, tmax = 10.0;
  Rng rng(8);
  const int n = 200000;
  double mean_u = 0.0;
  for (int i = 0; i < n; ++i) {
    const double T = sample_bridge_duration(s, tmax, rng);
    REQUIRE(T > 0.0);
    REQUIRE(T <= tmax);
    mean_u += s / T / n;
  }
  // E[u] = e^{-u0} / E1(u0)
  const double u0 = s / tmax;
  const double expect = std::exp(-u0) / boost::math::expint(1, u0);
  CHECK(mean_u == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("bridge acceptance rate matches the analytic rate") {
  const Complex x(-0.3, 0.0), y(0.3, 0.0);
  const double exact = bridge_acceptance_rate(x, y, 10.0);
  for (double dt : {1e-3, 1e-4}) {
    BridgeOptions opt;
    opt.dt = dt;
    BridgeStats stats;
    Rng rng(21);
    while (stats.attempts < 3000) sample_bridge_disk(x, y, opt, rng, &stats);
    const double n = static_cast<double>(stats.attempts);
    const double rate = stats.accepted / n;
    CHECK(std::abs(rate - exact) < 3 * std::sqrt(exact * (1 - exact) / n));
  }
}

TEST_CASE("bridge midpoints are symmetric under reflections") {
  const Complex x(-0.3, 0.0), y(0.3, 0.0);
  BridgeOptions opt;
  opt.dt = 1e-3;
  Rng rng(31);
  std::vector<double> quad(4, 0.0);
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const PolyPath p = sample_bridge_disk(x, y, opt, rng);
    const Complex m = p.points[p.points.size() / 2];
    quad[(m.real() > 0 ? 1 : 0) + (m.imag() > 0 ? 2 : 0)] += 1.0;
  }
  CHECK(chi2_pvalue(quad, std::vector<double>(4, n / 4.0)) > 0.01);
}

TEST_CASE("bridge occupation follows G(x,.)G(.,y)/G(x,y)") {
  const Complex x(-0.3, 0.0), y(0.3, 0.0);
  // bins: 2 radial rings x 4 quadrants
  auto bin_of = [](Complex z) {
    const int ring = std::abs(z) < 0.5 ? 0 : 1;
    const int q = (z.real() > 0 ? 1 : 0) + (z.imag() > 0 ? 2 : 0);
    return ring * 4 + q;
  };
  std::array<double, 8> expected{};
  const int m = 600;
  const double h = 2.0 / m;
  const double gxy = green_disk(x, y);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Complex z(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h);
      if (std::abs(z) >= 1.0) continue;
      expected[bin_of(z)] += green_disk(x, z) * green_disk(z, y) / gxy * h * h;
    }
  }
  BridgeOptions opt;
  opt.dt = 1e-3;
  Rng rng(41);
  const int n = 3000;
  std::array<double, 8> sum{}, sum2{};
  for (int k = 0; k < n; ++k) {
    const PolyPath p = sample_bridge_disk(x, y, opt, rng);
    std::array<double, 8> occ{};
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) occ[bin_of(0.5 * (p.points[i] + p.points[i + 1]))] += p.dt;
    for (int b = 0; b < 8; ++b) {
      sum[b] += occ[b];
      sum2[b] += occ[b] * occ[b];
    }
  }
  for (int b = 0; b < 8; ++b) {
    const double mean = sum[b] / n;
    const double se = std::sqrt((sum2[b] / n - mean * mean) / n);
    INFO("bin " << b << " mean " << mean << " expected " << expected[b] << " se " << se);
    CHECK(std::abs(mean - expected[b]) < 3 * se);
  }
}
