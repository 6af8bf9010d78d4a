#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "exclab/common.hpp"

namespace exclab {

/// 2n distinct points on the unit circle matched into n chords.
struct ChordDiagram {
  std::vector<double> angles;
  std::vector<std::pair<int, int>> chords;

  int n() const { return static_cast<int>(chords.size()); }
  Complex point(int k) const { return unit(angles[k]); }
};

/// Checks distinct angles, a perfect matching, and that no three chords meet
/// in a point.
void validate(const ChordDiagram& d);

/// Number of intersecting chord pairs.
int crossing_number(const ChordDiagram& d);

/// Pairs (i, j), i < j, of intersecting chords in lexicographic order; the
/// k-th entry is crossroad k.
std::vector<std::pair<int, int>> crossroads(const ChordDiagram& d);

/// Rewiring at a crossroad. Around the crossing the four ends e0..e3 are in
/// counterclockwise order, e0 being the end on the lower-index chord pointing
/// towards its second endpoint. `smooth_a` joins e0-e1 and e2-e3, `smooth_b`
/// joins e1-e2 and e3-e0, `cross` keeps both chords straight.
enum class Pattern : std::uint8_t { smooth_a, smooth_b, cross };

using CrossingConfig = std::vector<Pattern>;

struct ResolutionResult {
  std::vector<std::pair<int, int>> strands;  ///< induced pairing of the 2n points, sorted
  int loops = 0;
  bool admissible() const { return loops == 0; }
};

ResolutionResult resolve(const ChordDiagram& d, const CrossingConfig& config);

struct AdmissibleConfig {
  CrossingConfig config;
  std::vector<std::pair<int, int>> strands;
};

inline constexpr int kMaxEnumeratedCrossings = 20;

/// All admissible configurations, in base-3 order of their patterns.
std::vector<AdmissibleConfig> enumerate_admissible(const ChordDiagram& d);

struct MonotonicityReport {
  int m = 0;
  std::size_t configurations = 0;
  std::size_t admissible = 0;
  bool all_cross_admissible = false;
  bool monotone = true;  ///< induced crossing number never exceeds m
  bool unique = true;    ///< only the all-cross configuration reaches m
  std::vector<CrossingConfig> witnesses;
  bool pass() const { return all_cross_admissible && monotone && unique; }
};

MonotonicityReport verify_monotonicity_uniqueness(const ChordDiagram& d);

/// Ways to chain n labelled bridges into k ordered, oriented excursions by
/// matching bridge endpoints, by exhaustive enumeration.
std::uint64_t count_connecting_configs(int n, int k);

/// Random diagram with n chords on 2n uniform angles.
template <class Engine>
ChordDiagram random_diagram(int n, Engine& engine);

std::string pattern_name(Pattern p);

}  // namespace exclab

#include <algorithm>
#include <numeric>
#include <random>

namespace exclab {

template <class Engine>
ChordDiagram random_diagram(int n, Engine& engine) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  ChordDiagram d;
  d.angles.resize(2 * n);
  for (double& a : d.angles) a = ang(engine);
  std::vector<int> perm(2 * n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), engine);
  for (int i = 0; i < n; ++i) d.chords.emplace_back(perm[2 * i], perm[2 * i + 1]);
  return d;
}

}  // namespace exclab
