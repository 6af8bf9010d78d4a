#include "exclab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "exclab/hit_density.hpp"
#include "exclab/kernels.hpp"

namespace exclab {

namespace {

std::uint64_t point_seed(std::uint64_t seed, std::size_t k) { return derive_seed(seed, k, 0xfeed); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Weighted least squares y ~ X beta with inverse-variance weights; returns beta
// and its covariance.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                                const Eigen::VectorXd& w) {
  const Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
  const Eigen::MatrixXd normal = XtW * X;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const Eigen::VectorXd beta = ldlt.solve(XtW * y);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  return {beta, cov};
}

// Records the first entry into and the last exit from the disk |z| < r.
class FirstLastSink : public PathSink {
 public:
  explicit FirstLastSink(double r) : r_(r) {}
  bool push(Complex z) override {
    if (has_prev_) {
      const auto ts = segment_circle_params(prev_, z, r_);
      bool inside = std::norm(prev_) < r_ * r_;
      for (double t : ts) {
        const Complex bp = prev_ + t * (z - prev_);
        if (!hit) {
          hit = true;
          first = bp;
        }
        if (inside) last = bp;
        inside = !inside;
      }
    }
    prev_ = z;
    has_prev_ = true;
    return true;
  }
  void jump(Complex) override { has_prev_ = false; }

  bool hit = false;
  Complex first{}, last{};

 private:
  double r_;
  Complex prev_{};
  bool has_prev_ = false;
};

// Feeds the event evaluator and stores the path, stopping on a containment violation.
class TeeSink : public PathSink {
 public:
  TeeSink(EventEvaluator& ev, PolyPath& path) : ev_(ev), collect_(path) {}
  bool push(Complex z) override {
    collect_.push(z);
    return ev_.push(z) || !ev_.violation();
  }
  void jump(Complex z) override {
    collect_.jump(z);
    ev_.jump(z);
  }

 private:
  EventEvaluator& ev_;
  CollectingSink collect_;
};

double angle_0_2pi(Complex z) {
  const double a = std::arg(z);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

McEstimate bernoulli_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed, std::string digest) {
  McEstimate e;
  e.n_samples = n;
  e.hits = hits;
  e.master_seed = seed;
  e.config_digest = std::move(digest);
  if (n > 0) {
    e.mean = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  }
  return e;
}

void require_same_config(const McEstimate& a, const McEstimate& b) {
  if (a.config_digest != b.config_digest) {
    throw Error(ErrorCode::digest_mismatch,
                "estimates come from different configurations (" + a.config_digest + " vs " + b.config_digest + ")");
  }
}

void for_each_replica(std::uint64_t n, int workers, const std::function<void(std::uint64_t, int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::uint64_t err_replica = std::numeric_limits<std::uint64_t>::max();
  std::exception_ptr err;
  auto body = [&](int w) {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::uint64_t lo = next.fetch_add(kChunk);
      if (lo >= n) break;
      const std::uint64_t hi = std::min(n, lo + kChunk);
      for (std::uint64_t r = lo; r < hi; ++r) {
        try {
          fn(r, w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (r < err_replica) {
            err_replica = r;
            err = std::current_exception();
          }
          stop = true;
          break;
        }
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
}

std::vector<std::uint64_t> tally(std::uint64_t n, int workers, int categories,
                                 const std::function<int(std::uint64_t)>& outcome) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::vector<std::uint64_t>> local(workers, std::vector<std::uint64_t>(categories, 0));
  for_each_replica(n, workers, [&](std::uint64_t r, int w) {
    const int c = outcome(r);
    if (c < 0 || c >= categories) throw Error(ErrorCode::domain, "outcome out of range");
    ++local[w][c];
  });
  std::vector<std::uint64_t> total(categories, 0);
  for (const auto& l : local) {
    for (int c = 0; c < categories; ++c) total[c] += l[c];
  }
  return total;
}

TubeSystem make_system(const EventSpec& spec) {
  std::vector<Tube> tubes;
  for (const ChordSpec& c : spec.chords) tubes.push_back(build_tube_angles(c.angle_a, c.angle_b, spec.eps, spec.delta));
  return build_system(std::move(tubes));
}

double predicted_probability(const EventSpec& spec) {
  const double r = 1.0 - spec.delta;
  double p = 1.0;
  for (const ChordSpec& c : spec.chords) {
    const double len = std::abs(std::polar(r, c.angle_a) - std::polar(r, c.angle_b));
    p *= spec.eps * spec.eps * std::exp(-kPi * len / spec.eps);
  }
  return p;
}

void check_feasible(const EventSpec& spec) {
  const double p = predicted_probability(spec);
  if (p >= kMinPredictedProbability) return;
  // smallest feasible eps by bisection (the surrogate increases with eps), largest from the width limit
  double lo = spec.eps, hi = 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (predicted_probability(spec.with_eps(mid)) >= kMinPredictedProbability ? hi : lo) = mid;
  }
  const double r = 1.0 - spec.delta;
  double eps_max = 2.0 * r;
  for (const ChordSpec& c : spec.chords) eps_max = std::min(eps_max, 2.0 * (r - r * std::abs(std::cos(0.5 * (c.angle_b - c.angle_a)))));
  std::string range = hi < eps_max ? "[" + fmt(hi) + ", " + fmt(eps_max) + ")" : "none (tubes too wide first)";
  throw Error(ErrorCode::infeasible, "predicted event probability " + fmt(p) + " at eps = " + fmt(spec.eps) +
                                         " is below " + fmt(kMinPredictedProbability) + "; feasible eps range " + range);
}

int event_outcome(const EventSpec& spec, const TubeSystem& system, std::uint64_t seed, std::uint64_t replica) {
  Rng prng = pair_stream(seed, replica);
  const EndpointPairSet pairs = draw_pairs(spec.process, prng);
  if (pairs.empty()) return 0;
  ExcursionOptions opt = spec.sampler;
  opt.target_radius = system.radius();
  EventEvaluator ev(system);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Rng rng = excursion_stream(seed, replica, k);
    ev.begin_path();
    sample_unoriented(pairs[k], opt, rng, ev);
    if (ev.failed()) return 0;
  }
  if (!ev.event()) return 0;
  return ev.excursions_hitting() >= 2 ? 2 : 1;
}

EventCounts count_events(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers) {
  const TubeSystem system = make_system(spec);
  const auto t = tally(n, workers, 3, [&](std::uint64_t r) { return event_outcome(spec, system, seed, r); });
  return {n, t[1], t[2]};
}

McEstimate estimate_event(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers) {
  check_feasible(spec);
  const EventCounts c = count_events(spec, n, seed, workers);
  return bernoulli_estimate(c.events(), n, seed, config_digest(spec));
}

McEstimate estimate_event_two_stage(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers,
                                    const BridgeOptions& bridge) {
  if (spec.process.kind != ProcessSpec::Kind::fixed || spec.process.angles.size() != 1) {
    throw Error(ErrorCode::domain, "the two-stage estimator needs a single fixed pair");
  }
  check_feasible(spec);
  const TubeSystem system = make_system(spec);
  const double rho = system.radius();
  const EndpointPair pair = make_fixed_pairs(spec.process.angles).front();
  const double p_hit = hit_probability(rho, pair.x, pair.y);
  HitDensity g(pair.x, pair.y, rho);
  g.build_table();
  const auto t = tally(n, workers, 2, [&](std::uint64_t r) {
    Rng rng = Rng::for_stream(seed, r);
    const auto [a, b] = g.sample(rng);
    const Complex xp = std::polar(rho, a), yp = std::polar(rho, b);
    auto in_tubes = [&](Complex z) {
      return std::any_of(system.tubes().begin(), system.tubes().end(), [&](const Tube& tb) { return tb.in_strip(z); });
    };
    // first entry or last exit outside every tube already breaks containment
    if (!in_tubes(xp) || !in_tubes(yp)) return 0;
    const PolyPath path = sample_bridge_disk(xp, yp, bridge, rng);
    EventEvaluator ev(system);
    ev.begin_path();
    for (Complex z : path.points) {
      if (!ev.push(z)) break;
    }
    return ev.event() ? 1 : 0;
  });
  McEstimate e = bernoulli_estimate(t[1], n, seed, config_digest(spec));
  e.mean *= p_hit;
  e.std_error *= p_hit;
  return e;
}

DecayFit fit_decay_grid(std::vector<DecayPoint> grid) {
  DecayFit fit;
  std::vector<int> rows;
  std::string starved;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    DecayPoint& p = grid[i];
    p.used = p.estimate.hits >= kMinFitHits && p.estimate.mean > 0.0 && p.estimate.mean < 1.0;
    if (p.used) {
      rows.push_back(static_cast<int>(i));
    } else {
      starved += (starved.empty() ? "" : ", ") + ("eps=" + fmt(p.eps) + " hits=" + std::to_string(p.estimate.hits));
    }
  }
  if (rows.size() < 2) {
    throw Error(ErrorCode::insufficient_hits, "fewer than two grid points with at least " + std::to_string(kMinFitHits) +
                                                  " hits; starved: " + starved);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m), w(m), logp(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const DecayPoint& p = grid[rows[k]];
    const double mean = p.estimate.mean;
    logp(k) = std::log(mean);
    X(k, 0) = 1.0;
    X(k, 1) = -1.0 / p.eps;
    y(k) = logp(k) - 2.0 * std::log(p.eps);
    // delta method: var(log p) = (1 - p) / hits
    w(k) = static_cast<double>(p.estimate.hits) / (1.0 - mean);
  }
  const auto [beta, cov] = wls(X, y, w);
  fit.log_prefactor = beta(0);
  fit.fitted_rate = beta(1);
  fit.rate_stderr = std::sqrt(cov(1, 1));
  if (m >= 3) {
    Eigen::MatrixXd X3(m, 3);
    for (Eigen::Index k = 0; k < m; ++k) {
      X3(k, 0) = 1.0;
      X3(k, 1) = std::log(grid[rows[k]].eps);
      X3(k, 2) = X(k, 1);
    }
    const auto [b3, c3] = wls(X3, logp, w);
    fit.free_fit = true;
    fit.free_exponent = b3(1);
    fit.free_rate = b3(2);
  }
  fit.grid = std::move(grid);
  return fit;
}

DecayFit fit_decay(const EventSpec& spec, const std::vector<double>& eps_grid, std::uint64_t n_per_point,
                   std::uint64_t seed, int workers) {
  for (double e : eps_grid) check_feasible(spec.with_eps(e));
  std::vector<DecayPoint> grid;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    grid.push_back({eps_grid[k], estimate_event(spec.with_eps(eps_grid[k]), n_per_point, point_seed(seed, k), workers)});
  }
  return fit_decay_grid(std::move(grid));
}

SuppressionCheck fit_suppression_grid(std::vector<SuppressionPoint> grid) {
  SuppressionCheck out;
  std::vector<int> rows;
  std::string starved;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SuppressionPoint& p = grid[i];
    const double h1 = static_cast<double>(p.one.hits), h2 = static_cast<double>(p.two.hits);
    if (h1 > 0) {
      p.ratio = h2 / h1;
      p.ratio_stderr = h2 > 0 ? p.ratio * std::sqrt(1.0 / h1 + 1.0 / h2) : 0.0;
      if (p.ratio >= 1.0) out.ratios_below_one = false;
    } else {
      out.ratios_below_one = false;
    }
    p.used = p.one.hits >= kMinFitHits && p.two.hits >= kMinFitHits;
    if (p.used) {
      rows.push_back(static_cast<int>(i));
    } else {
      starved += (starved.empty() ? "" : ", ") + ("eps=" + fmt(p.eps) + " hits=" + std::to_string(p.one.hits) + "/" +
                                                   std::to_string(p.two.hits));
    }
  }
  out.grid = std::move(grid);
  if (rows.size() < 2) {
    throw Error(ErrorCode::insufficient_hits, "fewer than two grid points with at least " + std::to_string(kMinFitHits) +
                                                  " hits in both classes; starved: " + starved);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m), w(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const SuppressionPoint& p = out.grid[rows[k]];
    const double h1 = static_cast<double>(p.one.hits), h2 = static_cast<double>(p.two.hits);
    X(k, 0) = 1.0;
    X(k, 1) = std::log(p.eps);
    y(k) = std::log(p.ratio);
    w(k) = 1.0 / (1.0 / h1 + 1.0 / h2);
  }
  const auto [beta, cov] = wls(X, y, w);
  out.extra_exponent = beta(1);
  out.exponent_stderr = std::sqrt(cov(1, 1));
  return out;
}

SuppressionCheck n_suppression_check(const EventSpec& spec, const std::vector<double>& eps_grid, std::uint64_t n,
                                     std::uint64_t seed, int workers) {
  for (double e : eps_grid) check_feasible(spec.with_eps(e));
  std::vector<SuppressionPoint> grid;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const EventSpec s = spec.with_eps(eps_grid[k]);
    const std::uint64_t ps = point_seed(seed, k);
    const EventCounts c = count_events(s, n, ps, workers);
    const std::string digest = config_digest(s);
    SuppressionPoint p;
    p.eps = eps_grid[k];
    p.one = bernoulli_estimate(c.one, n, ps, digest);
    p.two = bernoulli_estimate(c.two, n, ps, digest);
    grid.push_back(p);
  }
  return fit_suppression_grid(std::move(grid));
}

RotationCheck f_ratio_rotation_check(const EventSpec& spec, double rotation, std::uint64_t n, std::uint64_t seed,
                                     int workers) {
  EventSpec turned = spec;
  for (ChordSpec& c : turned.chords) {
    c.angle_a += rotation;
    c.angle_b += rotation;
  }
  check_feasible(spec);
  check_feasible(turned);
  RotationCheck out;
  out.rotation = rotation;
  out.base = estimate_event(spec, n, point_seed(seed, 0), workers);
  out.rotated = estimate_event(turned, n, point_seed(seed, 1), workers);
  if (out.base.hits == 0 || out.rotated.hits == 0) {
    throw Error(ErrorCode::insufficient_hits, "rotation check needs hits in both estimates");
  }
  out.ratio = out.base.mean / out.rotated.mean;
  out.ratio_stderr = out.ratio * std::sqrt((1.0 - out.base.mean) / static_cast<double>(out.base.hits) +
                                           (1.0 - out.rotated.mean) / static_cast<double>(out.rotated.hits));
  out.z = (out.ratio - 1.0) / out.ratio_stderr;
  return out;
}

FormAgreement event_form_agreement(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers) {
  check_feasible(spec);
  const TubeSystem system = make_system(spec);
  const SausageOptions full{spec.sausage_r, true}, half{0.5 * spec.sausage_r, true};
  ExcursionOptions opt = spec.sampler;
  opt.target_radius = system.radius();
  // outcome bits: crossing form, sausage form at r, sausage form at r/2
  const auto t = tally(n, workers, 8, [&](std::uint64_t replica) {
    Rng prng = pair_stream(seed, replica);
    const EndpointPairSet pairs = draw_pairs(spec.process, prng);
    EventEvaluator ev(system, false);
    std::vector<PolyPath> paths(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      Rng rng = excursion_stream(seed, replica, k);
      ev.begin_path();
      TeeSink tee(ev, paths[k]);
      sample_unoriented(pairs[k], opt, rng, tee);
      if (ev.violation()) return 0;
    }
    const EventReport a = evaluate_event(paths, system, full);
    const TopologyReport b = topological_form(paths, system, half);
    return (a.event_crossing_form ? 1 : 0) | (a.event_topological_form ? 2 : 0) |
           (b.containment && b.connected && b.has_cut ? 4 : 0);
  });
  FormAgreement out;
  out.n = n;
  out.r = spec.sausage_r;
  for (int c = 1; c < 8; ++c) {
    const bool cross = c & 1, topo = c & 2, topo_half = c & 4;
    if (cross || topo) {
      out.positives += t[c];
      if (cross == topo) out.agree += t[c];
    }
    if (cross || topo_half) {
      out.positives_half += t[c];
      if (cross == topo_half) out.agree_half += t[c];
    }
  }
  return out;
}

HitHistogram empirical_hit_density(Complex x, Complex y, double delta, std::uint64_t n, std::uint64_t seed,
                                   int workers, int bins, const ExcursionOptions& sampler) {
  const double rho = 1.0 - delta;
  const double p_hit = hit_probability(rho, x, y);
  if (p_hit < 1e-3) {
    throw Error(ErrorCode::infeasible, "hit probability " + fmt(p_hit) + " of the inner disk is below 1e-3");
  }
  ExcursionOptions opt = sampler;
  opt.target_radius = rho;
  const double width = kTwoPi / bins;
  const int cells = bins * bins;
  auto bin_of = [&](Complex z) { return std::min(bins - 1, static_cast<int>(angle_0_2pi(z) / width)); };
  const auto t = tally(n, workers, cells + 1, [&](std::uint64_t r) {
    Rng rng = Rng::for_stream(seed, r);
    FirstLastSink sink(rho);
    sample_excursion_disk(x, y, opt, rng, sink);
    if (!sink.hit) return cells;
    return bin_of(sink.first) * bins + bin_of(sink.last);
  });
  HitHistogram h;
  h.bins = bins;
  h.n = n;
  h.counts.assign(t.begin(), t.begin() + cells);
  h.conditioned = n - t[cells];
  h.hit = bernoulli_estimate(h.conditioned, n, seed, "");
  const HitDensity g(x, y, rho);
  h.expected.resize(cells);
  double total = 0.0;
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      h.expected[i * bins + j] = g.box_mass(i * width, (i + 1) * width, j * width, (j + 1) * width);
      total += h.expected[i * bins + j];
    }
  }
  for (double& e : h.expected) e /= total;
  // cells expected to hold fewer than 5 counts are pooled into one
  double pooled_e = 0.0, pooled_o = 0.0;
  int kept = 0;
  for (int c = 0; c < cells; ++c) {
    const double e = h.expected[c] * static_cast<double>(h.conditioned);
    const double o = static_cast<double>(h.counts[c]);
    if (e < 5.0) {
      pooled_e += e;
      pooled_o += o;
      ++h.pooled_cells;
    } else {
      h.chi2 += (o - e) * (o - e) / e;
      ++kept;
    }
  }
  if (h.pooled_cells > 0) {
    if (pooled_e < 5.0) {
      throw Error(ErrorCode::starved_bins, std::to_string(h.pooled_cells) + " bins with expected count " + fmt(pooled_e) +
                                               " in total, below 5 even when pooled");
    }
    h.chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
    ++kept;
  }
  if (kept < 2) throw Error(ErrorCode::starved_bins, "fewer than two bins with expected count 5 or more");
  h.dof = kept - 1;
  h.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(h.dof), h.chi2));
  return h;
}

namespace {

// One walk-on-spheres step from z: jump to a uniform point of the largest circle around z inside the disk.
Complex wos_step(Complex z, double r, Rng& rng) { return z + r * unit(kTwoPi * rng.uniform()); }

WosResult mean_of(const std::vector<double>& v) {
  WosResult out;
  out.n = v.size();
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  out.mean = s / n;
  out.std_error = std::sqrt(std::max(0.0, s2 / n - out.mean * out.mean) / n);
  return out;
}

}  // namespace

WosResult wos_ring_occupation(Complex x, double r0, double r1, std::uint64_t n, std::uint64_t seed, int workers,
                              double stop) {
  std::vector<double> occ(n, 0.0);
  for_each_replica(n, workers, [&](std::uint64_t k, int) {
    Rng rng = Rng::for_stream(seed, k);
    Complex z = x;
    double total = 0.0;
    for (double r = 1.0 - std::abs(z); r > stop; r = 1.0 - std::abs(z)) {
      // occupation of the ball before leaving it: mass r^2/2, radial law of |y - z| / r with density 4u log(1/u)
      const double u = std::sqrt(rng.uniform() * rng.uniform());
      const double s = std::abs(z + r * u * unit(kTwoPi * rng.uniform()));
      if (s > r0 && s < r1) total += 0.5 * r * r;
      z = wos_step(z, r, rng);
    }
    occ[k] = total;
  });
  return mean_of(occ);
}

std::vector<std::uint64_t> wos_exit_histogram(Complex x, int bins, std::uint64_t n, std::uint64_t seed, int workers,
                                              double stop) {
  const auto t = tally(n, workers, bins, [&](std::uint64_t k) {
    Rng rng = Rng::for_stream(seed, k);
    Complex z = x;
    for (double r = 1.0 - std::abs(z); r > stop; r = 1.0 - std::abs(z)) z = wos_step(z, r, rng);
    return std::min(bins - 1, static_cast<int>(angle_0_2pi(z) / (kTwoPi / bins)));
  });
  return t;
}

}  // namespace exclab
