#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "exclab/common.hpp"
#include "exclab/path.hpp"
#include "exclab/rng.hpp"
#include "exclab/sampler.hpp"

namespace exclab {

/// Unordered pair of distinct boundary points, stored with arg(x) < arg(y).
struct EndpointPair {
  Complex x{}, y{};
};

using EndpointPairSet = std::vector<EndpointPair>;

EndpointPair make_pair_unordered(Complex p, Complex q);

/// Pairs from explicit boundary angles.
EndpointPairSet make_fixed_pairs(const std::vector<std::pair<double, double>>& angles);

/// Expected number of pairs with |x - y| > rho_min under the intensity
/// dλ(x)dλ(y) / (4|x-y|²) on ordered pairs: (π/2) cot(φ0/2), φ0 = 2 asin(rho_min/2).
double poisson_pair_mass(double rho_min);

/// Poisson process of pairs with that intensity, restricted to |x - y| > rho_min.
EndpointPairSet sample_poisson_pairs(double rho_min, Rng& rng);

/// How the endpoint pairs of one replica are produced.
struct ProcessSpec {
  enum class Kind { fixed, poisson };
  Kind kind = Kind::fixed;
  std::vector<std::pair<double, double>> angles;  ///< fixed pairs
  double rho_min = 0.5;                           ///< Poisson cut-off

  /// The same process rotated by `angle` (Poisson specs are unchanged).
  ProcessSpec rotated(double angle) const;
};

EndpointPairSet draw_pairs(const ProcessSpec& spec, Rng& rng);

/// Random stream layout of a replica: stream 0 draws the pairs, stream k+1
/// drives excursion k.
inline Rng pair_stream(std::uint64_t seed, std::uint64_t replica) { return Rng::for_stream(seed, replica, 0); }
inline Rng excursion_stream(std::uint64_t seed, std::uint64_t replica, std::uint64_t k) {
  return Rng::for_stream(seed, replica, k + 1);
}

/// Draws an orientation for the pair and samples one excursion into `sink`.
void sample_unoriented(const EndpointPair& pair, const ExcursionOptions& opt, Rng& rng, PathSink& sink);

/// One excursion per pair. Paths carry an arbitrary orientation.
class ExcursionProcessSample {
 public:
  ExcursionProcessSample() = default;
  ExcursionProcessSample(EndpointPairSet pairs, std::vector<PolyPath> paths);
  const EndpointPairSet& pairs() const { return pairs_; }
  const std::vector<PolyPath>& paths() const { return paths_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  EndpointPairSet pairs_;
  std::vector<PolyPath> paths_;
};

ExcursionProcessSample sample_process(const EndpointPairSet& pairs, const ExcursionOptions& opt, std::uint64_t seed,
                                      std::uint64_t replica);

struct CDeltaRecord {
  double delta = 0.0;
  std::vector<EndpointPair> pairs_on_inner;
  int n_delta = 0;
};

/// First and last points of every excursion on the circle of radius 1 - delta.
CDeltaRecord extract_c_delta(const ExcursionProcessSample& sample, double delta);

/// Number of excursions whose trace has diameter greater than eps.
int local_finiteness_census(const ExcursionProcessSample& sample, double eps);

}  // namespace exclab
