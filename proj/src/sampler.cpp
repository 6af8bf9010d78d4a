#include "exclab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/expint.hpp>

#include "exclab/kernels.hpp"

namespace exclab {

HalfPlaneChart::HalfPlaneChart(Complex x, Complex y) : x_(x), y_(y) {
  Complex mid = x + y;
  Complex zm = std::abs(mid) > 1e-3 ? -mid / std::abs(mid) : x * Complex(0.0, 1.0);
  const Complex t = (zm - x) / (zm - y);
  rot_ = std::conj(t / std::abs(t));
  if ((rot_ * (x / y)).imag() < 0.0) rot_ = -rot_;
}

Complex HalfPlaneChart::to_disk(Complex w) const {
  const Complex wp = w * std::conj(rot_);
  return (x_ - y_ * wp) / (1.0 - wp);
}

Complex HalfPlaneChart::from_disk(Complex z) const { return rot_ * (z - x_) / (z - y_); }

double HalfPlaneChart::derivative(Complex w) const {
  const Complex wp = w * std::conj(rot_);
  return std::abs(x_ - y_) / std::norm(1.0 - wp);
}

namespace {

struct Circle {
  Complex c;
  double r;
};

Circle circumcircle(Complex a, Complex b, Complex c) {
  const double d = 2.0 * (a.real() * (b.imag() - c.imag()) + b.real() * (c.imag() - a.imag()) +
                          c.real() * (a.imag() - b.imag()));
  const double ux = (std::norm(a) * (b.imag() - c.imag()) + std::norm(b) * (c.imag() - a.imag()) +
                     std::norm(c) * (a.imag() - b.imag())) / d;
  const double uy = (std::norm(a) * (c.real() - b.real()) + std::norm(b) * (a.real() - c.real()) +
                     std::norm(c) * (b.real() - a.real())) / d;
  const Complex o(ux, uy);
  return {o, std::abs(a - o)};
}

void check_boundary_pair(Complex x, Complex y) {
  if (std::abs(std::abs(x) - 1.0) > 1e-9 || std::abs(std::abs(y) - 1.0) > 1e-9) {
    throw Error(ErrorCode::domain, "excursion endpoints must lie on the unit circle");
  }
  if (std::abs(x - y) < 1e-6) throw Error(ErrorCode::degenerate_map, "excursion endpoints closer than 1e-6");
}

}  // namespace

void sample_excursion_disk(Complex x, Complex y, const ExcursionOptions& opt, Rng& rng, PathSink& sink) {
  check_boundary_pair(x, y);
  if (!(opt.dt > 0.0)) throw Error(ErrorCode::domain, "dt must be positive");
  const HalfPlaneChart chart(x, y);

  const double rho = opt.target_radius;
  const bool accel = opt.accelerate && rho > 0.0;
  const bool refine = opt.refine && rho > 0.0;
  const double floor2 = opt.refine_floor * opt.dt;
  Circle target{};
  Complex pole = chart.pole();
  double lim_p_im = 0.0, log_lambda = 0.0, top = 0.0;
  if (accel) {
    target = circumcircle(chart.from_disk(rho), chart.from_disk(Complex(0, rho)), chart.from_disk(-rho));
    const double cy = target.c.imag();
    lim_p_im = std::sqrt(cy * cy - target.r * target.r);
    top = cy + target.r;
    log_lambda = std::log((top - lim_p_im) / (top + lim_p_im));
  }
  const Complex lim_p(target.c.real(), lim_p_im);

  const Complex rot_inv = std::conj(chart.pole());
  const double chord = std::abs(x - y);
  const double dphi_num2 = chord * chord;

  double X = 0.0, Y = 0.0;
  Complex z = x;
  // 1 - w e^{-i beta}, the denominator of the chart at the current point
  Complex den(1.0, 0.0);
  if (!sink.push(x)) return;
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    const double den2 = std::norm(den);
    // |d z / d w|^2 = chord^2 / |den|^4
    const double dphi2 = dphi_num2 / (den2 * den2);
    double hd = opt.dt;
    if (refine) {
      const double gap = opt.refine_kappa * (std::sqrt(std::norm(z)) - rho);
      if (gap > 0.0) hd = std::clamp(gap * gap, floor2, opt.dt);
    }
    double h = hd / dphi2;
    if (accel) {
      const Complex w(X, Y);
      const double room = std::min(std::max(0.0, std::abs(w - target.c) - target.r), std::abs(w - pole));
      h = std::max(h, (opt.kappa * room) * (opt.kappa * room));
      if (Y > 0.0 && room > 0.0) {
        const double u = 0.5 * std::log(std::norm(w - lim_p) / std::norm(w - std::conj(lim_p))) / log_lambda;
        if (top / Y * u < opt.stop_bound) {
          sink.jump(y);
          return;
        }
      }
    }
    const double sh = std::sqrt(h);
    X += sh * rng.normal();
    const double y1 = Y + sh * rng.normal();
    Y = std::sqrt(y1 * y1 + 2.0 * h * rng.exponential());
    const Complex wp = Complex(X, Y) * rot_inv;
    den = 1.0 - wp;
    const Complex num = x - y * wp;
    z = Complex(num.real() * den.real() + num.imag() * den.imag(),
                num.imag() * den.real() - num.real() * den.imag()) / std::norm(den);
    if (!accel && std::norm(z - y) < opt.dt) {
      if (sink.push(z)) sink.push(y);
      return;
    }
    if (!sink.push(z)) return;
  }
  throw Error(ErrorCode::nonconvergence, "excursion did not reach its endpoint within max_steps");
}

PolyPath sample_excursion_disk(Complex x, Complex y, double dt, Rng& rng) {
  PolyPath path;
  path.dt = dt;
  path.kind = PathKind::excursion;
  CollectingSink sink(path);
  ExcursionOptions opt;
  opt.dt = dt;
  sample_excursion_disk(x, y, opt, rng, sink);
  return path;
}

double sample_bridge_duration(double s, double t_max, Rng& rng) {
  // u = s / T has density proportional to e^{-u}/u on [u0, inf).
  const double u0 = s / t_max;
  const double mass_low = u0 < 1.0 ? std::log(1.0 / u0) : 0.0;
  const double mass_high = u0 < 1.0 ? std::exp(-1.0) : 0.0;
  for (;;) {
    double u;
    if (u0 >= 1.0) {
      u = u0 + rng.exponential();
      if (rng.uniform() * u > u0) continue;
    } else if (rng.uniform() * (mass_low + mass_high) < mass_low) {
      u = u0 * std::pow(1.0 / u0, rng.uniform());
      if (rng.uniform() > std::exp(-u)) continue;
    } else {
      u = 1.0 + rng.exponential();
      if (rng.uniform() * u > 1.0) continue;
    }
    return s / u;
  }
}

double bridge_acceptance_rate(Complex x, Complex y, double t_max) {
  const double s = 0.5 * std::norm(x - y);
  return kTwoPi * green_disk(x, y) / boost::math::expint(1, s / t_max);
}

PolyPath sample_bridge_disk(Complex x, Complex y, const BridgeOptions& opt, Rng& rng, BridgeStats* stats) {
  if (!(std::abs(x) < 1.0 && std::abs(y) < 1.0)) throw Error(ErrorCode::domain, "bridge endpoints must be interior");
  if (std::abs(x - y) < kCoincidentTol) throw Error(ErrorCode::coincident_points, "bridge endpoints coincide");
  if (!(opt.dt > 0.0 && opt.dt <= 1e-3)) throw Error(ErrorCode::domain, "bridge dt must lie in (0, 1e-3]");
  const double s = 0.5 * std::norm(x - y);
  PolyPath path;
  path.dt = opt.dt;
  path.kind = PathKind::bridge;
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    if (stats) ++stats->attempts;
    const double T = sample_bridge_duration(s, opt.t_max, rng);
    const auto n = static_cast<std::size_t>(std::ceil(T / opt.dt));
    const double h = T / static_cast<double>(n);
    path.points.clear();
    path.points.reserve(n + 1);
    path.points.push_back(x);
    Complex z = x;
    bool ok = true;
    for (std::size_t k = 1; k < n && ok; ++k) {
      const double remaining = T - static_cast<double>(k - 1) * h;
      const Complex mean = z + (y - z) * (h / remaining);
      const double sd = std::sqrt(h * (remaining - h) / remaining);
      const Complex next = mean + sd * Complex(rng.normal(), rng.normal());
      const double d1 = 1.0 - std::abs(z), d2 = 1.0 - std::abs(next);
      // Crossing of the (locally flat) circle between two inside samples.
      if (d2 <= 0.0 || rng.uniform() < std::exp(-2.0 * d1 * d2 / h)) ok = false;
      z = next;
      path.points.push_back(z);
    }
    if (ok) {
      const double d1 = 1.0 - std::abs(z), d2 = 1.0 - std::abs(y);
      if (rng.uniform() < std::exp(-2.0 * d1 * d2 / h)) ok = false;
    }
    if (!ok) continue;
    path.points.push_back(y);
    path.dt = h;
    if (stats) ++stats->accepted;
    return path;
  }
  throw Error(ErrorCode::rejection_budget, "bridge rejection budget exhausted");
}

}  // namespace exclab
