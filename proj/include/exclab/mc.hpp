#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exclab/common.hpp"
#include "exclab/process.hpp"
#include "exclab/sampler.hpp"
#include "exclab/tube.hpp"

namespace exclab {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t master_seed = 0;
  std::string config_digest;
};

McEstimate bernoulli_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed, std::string digest);

/// Throws digest_mismatch unless both estimates describe the same configuration.
void require_same_config(const McEstimate& a, const McEstimate& b);

/// Calls fn(replica, worker) for every replica in [0, n) on `workers` threads.
/// The first error, by replica index, is rethrown.
void for_each_replica(std::uint64_t n, int workers, const std::function<void(std::uint64_t, int)>& fn);

/// Number of replicas with each outcome in [0, categories).
std::vector<std::uint64_t> tally(std::uint64_t n, int workers, int categories,
                                 const std::function<int(std::uint64_t)>& outcome);

struct ChordSpec {
  double angle_a = 0.0;
  double angle_b = kPi;
};

/// A tube event experiment: process of endpoint pairs, tubes over chords of
/// the circle of radius 1 - delta, and sampler settings.
struct EventSpec {
  ProcessSpec process;
  double delta = 0.5;
  std::vector<ChordSpec> chords;
  double eps = 0.1;
  ExcursionOptions sampler = default_event_sampler();
  double sausage_r = 0.04;

  static ExcursionOptions default_event_sampler() {
    ExcursionOptions o;
    o.accelerate = true;
    return o;
  }
  EventSpec with_eps(double e) const {
    EventSpec s = *this;
    s.eps = e;
    return s;
  }
};

std::string config_digest(const EventSpec& spec);
TubeSystem make_system(const EventSpec& spec);

inline constexpr double kMinPredictedProbability = 1e-6;

/// Product over tubes of eps^2 exp(-pi |a-b| / eps).
double predicted_probability(const EventSpec& spec);
/// Throws infeasible, with the predicted probability and the usable eps range,
/// when the predicted probability is below kMinPredictedProbability.
void check_feasible(const EventSpec& spec);

/// Replica outcome: 0 no event, 1 event with one excursion reaching the inner
/// disk, 2 event with two or more.
int event_outcome(const EventSpec& spec, const TubeSystem& system, std::uint64_t seed, std::uint64_t replica);

struct EventCounts {
  std::uint64_t n = 0;
  std::uint64_t one = 0;  ///< event, exactly one excursion hitting
  std::uint64_t two = 0;  ///< event, two or more hitting
  std::uint64_t events() const { return one + two; }
};

EventCounts count_events(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers);
McEstimate estimate_event(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers);

/// Same event for a single fixed pair, estimated by drawing the first and
/// last visits (x', y') of the inner circle from their exact law and a disk
/// bridge between them: P = (K~/K) P(event for the bridge).
McEstimate estimate_event_two_stage(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers,
                                    const BridgeOptions& bridge = {});

inline constexpr std::uint64_t kMinFitHits = 50;

struct DecayPoint {
  double eps = 0.0;
  McEstimate estimate;
  bool used = false;
};

/// log P = -rate/eps + 2 log eps + c by weighted least squares.
struct DecayFit {
  std::vector<DecayPoint> grid;
  double fitted_rate = 0.0;
  double rate_stderr = 0.0;
  double log_prefactor = 0.0;
  int prefactor_exponent = 2;
  /// Diagnostic refit of log P = -rate/eps + alpha log eps + c.
  bool free_fit = false;
  double free_exponent = 0.0;
  double free_rate = 0.0;
};

DecayFit fit_decay_grid(std::vector<DecayPoint> grid);
DecayFit fit_decay(const EventSpec& spec, const std::vector<double>& eps_grid, std::uint64_t n_per_point,
                   std::uint64_t seed, int workers);

struct SuppressionPoint {
  double eps = 0.0;
  McEstimate one;  ///< event with exactly one excursion hitting
  McEstimate two;  ///< event with two or more hitting
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  bool used = false;
};

struct SuppressionCheck {
  std::vector<SuppressionPoint> grid;
  double extra_exponent = 0.0;
  double exponent_stderr = 0.0;
  bool ratios_below_one = true;
};

/// log(two / one) = alpha log eps + c on points where both counts reach kMinFitHits.
SuppressionCheck fit_suppression_grid(std::vector<SuppressionPoint> grid);
SuppressionCheck n_suppression_check(const EventSpec& spec, const std::vector<double>& eps_grid, std::uint64_t n,
                                     std::uint64_t seed, int workers);

struct RotationCheck {
  double rotation = 0.0;
  McEstimate base;
  McEstimate rotated;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  /// (ratio - 1) / ratio_stderr
  double z = 0.0;
};

/// Ratio of the event probabilities for the tubes and for the tubes rotated
/// by `rotation`, under the same (unrotated) process.
RotationCheck f_ratio_rotation_check(const EventSpec& spec, double rotation, std::uint64_t n, std::uint64_t seed,
                                     int workers);

struct HitHistogram {
  int bins = 0;
  std::uint64_t n = 0;
  std::uint64_t conditioned = 0;
  std::vector<std::uint64_t> counts;  ///< row-major, [x' bin][y' bin]
  std::vector<double> expected;       ///< probabilities under g
  int pooled_cells = 0;  ///< cells with expected count below 5, merged into one
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  McEstimate hit;
};

/// Crossing form against the sausage-graph form on the same replicas, at
/// sausage radius r and r/2. A replica counts as positive at a radius when
/// either form holds there.
struct FormAgreement {
  std::uint64_t n = 0;
  double r = 0.0;
  std::uint64_t positives = 0, agree = 0;            ///< radius r
  std::uint64_t positives_half = 0, agree_half = 0;  ///< radius r/2
  double rate() const { return positives ? static_cast<double>(agree) / positives : 1.0; }
  double rate_half() const { return positives_half ? static_cast<double>(agree_half) / positives_half : 1.0; }
};

FormAgreement event_form_agreement(const EventSpec& spec, std::uint64_t n, std::uint64_t seed, int workers);

/// First/last visit points of the circle of radius 1 - delta over excursions
/// from x to y that reach it, binned in angle and compared with g.
HitHistogram empirical_hit_density(Complex x, Complex y, double delta, std::uint64_t n, std::uint64_t seed,
                                   int workers, int bins = 12, const ExcursionOptions& sampler = {});

/// Walk-on-spheres estimates in the unit disk, stopped within `stop` of the circle.
struct WosResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

/// Expected time spent in the ring r0 < |z| < r1 by Brownian motion from x
/// killed on the unit circle.
WosResult wos_ring_occupation(Complex x, double r0, double r1, std::uint64_t n, std::uint64_t seed, int workers,
                              double stop = 1e-6);

/// Exit angles of Brownian motion from x, binned into `bins` equal arcs.
std::vector<std::uint64_t> wos_exit_histogram(Complex x, int bins, std::uint64_t n, std::uint64_t seed, int workers,
                                              double stop = 1e-9);

}  // namespace exclab
