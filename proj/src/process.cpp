#include "exclab/process.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/poisson_distribution.hpp>

namespace exclab {

EndpointPair make_pair_unordered(Complex p, Complex q) {
  if (std::arg(p) <= std::arg(q)) return {p, q};
  return {q, p};
}

EndpointPairSet make_fixed_pairs(const std::vector<std::pair<double, double>>& angles) {
  EndpointPairSet out;
  for (auto [s, t] : angles) {
    const Complex p = unit(s), q = unit(t);
    if (std::abs(p - q) < 1e-12) throw Error(ErrorCode::coincident_points, "pair angles coincide");
    out.push_back(make_pair_unordered(p, q));
  }
  return out;
}

double poisson_pair_mass(double rho_min) {
  if (!(rho_min > 0.0 && rho_min < 2.0)) throw Error(ErrorCode::domain, "rho_min must lie in (0,2)");
  const double phi0 = 2.0 * std::asin(0.5 * rho_min);
  return 0.5 * kPi / std::tan(0.5 * phi0);
}

EndpointPairSet sample_poisson_pairs(double rho_min, Rng& rng) {
  const double mass = poisson_pair_mass(rho_min);
  const double c0 = 1.0 / std::tan(std::asin(0.5 * rho_min));
  boost::random::poisson_distribution<int, double> count(mass);
  const int n = count(rng.engine());
  EndpointPairSet out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * rng.uniform();
    // angular gap phi has density proportional to 1/sin^2(phi/2): cot(phi/2) is uniform
    const double cot_half = c0 * (1.0 - 2.0 * rng.uniform());
    const double phi = 2.0 * std::atan2(1.0, cot_half);
    out.push_back(make_pair_unordered(unit(theta), unit(theta + phi)));
  }
  return out;
}

ProcessSpec ProcessSpec::rotated(double angle) const {
  ProcessSpec out = *this;
  for (auto& [s, t] : out.angles) {
    s += angle;
    t += angle;
  }
  return out;
}

EndpointPairSet draw_pairs(const ProcessSpec& spec, Rng& rng) {
  if (spec.kind == ProcessSpec::Kind::fixed) return make_fixed_pairs(spec.angles);
  return sample_poisson_pairs(spec.rho_min, rng);
}

void sample_unoriented(const EndpointPair& pair, const ExcursionOptions& opt, Rng& rng, PathSink& sink) {
  if (rng.bits() & 1U) {
    sample_excursion_disk(pair.x, pair.y, opt, rng, sink);
  } else {
    sample_excursion_disk(pair.y, pair.x, opt, rng, sink);
  }
}

ExcursionProcessSample::ExcursionProcessSample(EndpointPairSet pairs, std::vector<PolyPath> paths)
    : pairs_(std::move(pairs)), paths_(std::move(paths)) {
  if (pairs_.size() != paths_.size()) throw Error(ErrorCode::domain, "one path per pair required");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& pts = paths_[i].points;
    const Complex s = pts.front(), e = pts.back();
    const auto& pr = pairs_[i];
    const bool fwd = std::abs(s - pr.x) < 1e-9 && std::abs(e - pr.y) < 1e-9;
    const bool bwd = std::abs(s - pr.y) < 1e-9 && std::abs(e - pr.x) < 1e-9;
    if (!fwd && !bwd) throw Error(ErrorCode::domain, "path endpoints do not match their pair");
  }
}

ExcursionProcessSample sample_process(const EndpointPairSet& pairs, const ExcursionOptions& opt, std::uint64_t seed,
                                      std::uint64_t replica) {
  std::vector<PolyPath> paths;
  paths.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Rng rng = excursion_stream(seed, replica, k);
    PolyPath path;
    path.dt = opt.dt;
    CollectingSink sink(path);
    sample_unoriented(pairs[k], opt, rng, sink);
    paths.push_back(std::move(path));
  }
  return ExcursionProcessSample(pairs, std::move(paths));
}

CDeltaRecord extract_c_delta(const ExcursionProcessSample& sample, double delta) {
  CDeltaRecord rec;
  rec.delta = delta;
  for (const PolyPath& p : sample.paths()) {
    const HitRecord h = first_last_hit(p, delta);
    if (!h.hit) continue;
    rec.pairs_on_inner.push_back(make_pair_unordered(h.x_first, h.y_last));
    ++rec.n_delta;
  }
  std::sort(rec.pairs_on_inner.begin(), rec.pairs_on_inner.end(), [](const EndpointPair& a, const EndpointPair& b) {
    return std::arg(a.x) < std::arg(b.x);
  });
  return rec;
}

int local_finiteness_census(const ExcursionProcessSample& sample, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::domain, "eps must be positive");
  int n = 0;
  for (const PolyPath& p : sample.paths()) n += trace_diameter(p) > eps ? 1 : 0;
  return n;
}

}  // namespace exclab
