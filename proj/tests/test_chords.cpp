#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "exclab/chords.hpp"

using namespace exclab;

namespace {

ChordDiagram diagram(std::vector<double> angles, std::vector<std::pair<int, int>> chords) {
  ChordDiagram d{std::move(angles), std::move(chords)};
  validate(d);
  return d;
}

// 2n points spread evenly (slightly jittered off exact symmetry), point k matched to k + n.
ChordDiagram alternating(int n) {
  ChordDiagram d;
  for (int k = 0; k < 2 * n; ++k) d.angles.push_back(k * kPi / n + 0.01 * std::sin(3.0 * k + 1.0));
  for (int k = 0; k < n; ++k) d.chords.emplace_back(k, k + n);
  return d;
}

// Number of pairs of chords joining points of the circle that interleave, by brute force.
int brute_crossings(const ChordDiagram& d, const std::vector<std::pair<int, int>>& pairing) {
  int m = 0;
  for (std::size_t i = 0; i < pairing.size(); ++i) {
    for (std::size_t j = i + 1; j < pairing.size(); ++j) {
      const Complex p = d.point(pairing[i].first), q = d.point(pairing[i].second);
      const Complex r = d.point(pairing[j].first), s = d.point(pairing[j].second);
      const bool a = cross(q - p, r - p) * cross(q - p, s - p) < 0;
      const bool b = cross(s - r, p - r) * cross(s - r, q - r) < 0;
      m += a && b;
    }
  }
  return m;
}

std::vector<std::pair<int, int>> sorted_pairs(std::vector<std::pair<int, int>> v) {
  for (auto& [a, b] : v) {
    if (a > b) std::swap(a, b);
  }
  std::sort(v.begin(), v.end());
  return v;
}

// Chains of n labelled bridges into k ordered oriented excursions, by a recursion on the last bridge:
// it is glued onto either end of one of the chains formed by the others, or forms a chain alone.
std::uint64_t chains_recursive(int n, int k) {
  if (k <= 0 || k > n) return 0;
  if (n == 1) return 2;
  return 2 * static_cast<std::uint64_t>(n - 1 + k) * chains_recursive(n - 1, k) +
         2 * static_cast<std::uint64_t>(k) * chains_recursive(n - 1, k - 1);
}

}  // namespace

TEST_CASE("crossing numbers") {
  CHECK(crossing_number(diagram({0.0, kPi, kPi / 2, 3 * kPi / 2}, {{0, 1}, {2, 3}})) == 1);
  CHECK(crossing_number(diagram({0.0, 2.0, 3.0, 5.0}, {{0, 1}, {2, 3}})) == 0);
  // nested, non-crossing matching
  CHECK(crossing_number(diagram({0.0, 0.5, 1.0, 1.5, 2.0, 2.5}, {{0, 5}, {1, 4}, {2, 3}})) == 0);
  for (int n = 1; n <= 5; ++n) {
    const ChordDiagram d = alternating(n);
    validate(d);
    CHECK(crossing_number(d) == n * (n - 1) / 2);
    CHECK(crossing_number(d) == brute_crossings(d, d.chords));
    CHECK(crossroads(d).size() == static_cast<std::size_t>(n * (n - 1) / 2));
  }
}

TEST_CASE("diagram validation") {
  CHECK_THROWS_AS(validate({{0.0, 1.0, 1.0, 2.0}, {{0, 1}, {2, 3}}}), Error);
  CHECK_THROWS_AS(validate({{0.0, 1.0, 2.0, 3.0}, {{0, 1}, {1, 3}}}), Error);
  CHECK_THROWS_AS(validate({{0.0, 1.0, 2.0}, {{0, 1}}}), Error);
  // three diameters meet at the centre
  try {
    validate({{0.0, kPi, 1.0, 1.0 + kPi, 2.0, 2.0 + kPi}, {{0, 1}, {2, 3}, {4, 5}}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::general_position);
  }
}

TEST_CASE("resolution of small diagrams") {
  const ChordDiagram flat = diagram({0.0, 2.0, 3.0, 5.0}, {{0, 1}, {2, 3}});
  ResolutionResult r = resolve(flat, {});
  CHECK(r.loops == 0);
  CHECK(r.strands == sorted_pairs(flat.chords));

  const ChordDiagram two = diagram({0.0, kPi, kPi / 2, 3 * kPi / 2}, {{0, 1}, {2, 3}});
  r = resolve(two, {Pattern::cross});
  CHECK(r.admissible());
  CHECK(r.strands == sorted_pairs(two.chords));
  const ResolutionResult a = resolve(two, {Pattern::smooth_a});
  const ResolutionResult b = resolve(two, {Pattern::smooth_b});
  CHECK(a.admissible());
  CHECK(b.admissible());
  CHECK(a.strands != b.strands);
  CHECK(brute_crossings(two, a.strands) == 0);
  CHECK(brute_crossings(two, b.strands) == 0);
  // the two non-crossing pairings of four points in circular order 0, 2, 1, 3
  const std::set<std::vector<std::pair<int, int>>> expected{{{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  CHECK(expected.count(a.strands) == 1);
  CHECK(expected.count(b.strands) == 1);
  CHECK_THROWS_AS(resolve(two, {}), Error);

  const ChordDiagram three = alternating(3);
  int with_loops = 0;
  for (int code = 0; code < 27; ++code) {
    CrossingConfig c;
    for (int k = 0, v = code; k < 3; ++k, v /= 3) c.push_back(static_cast<Pattern>(v % 3));
    const ResolutionResult res = resolve(three, c);
    with_loops += res.loops > 0;
    // strands always form a perfect matching of the six points
    std::vector<int> seen(6, 0);
    for (auto [u, v] : res.strands) {
      ++seen[u];
      ++seen[v];
    }
    CHECK(static_cast<int>(res.strands.size()) == 3);
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
  CHECK(with_loops >= 1);
}

TEST_CASE("admissible configurations") {
  CHECK(enumerate_admissible(diagram({0.0, 2.0, 3.0, 5.0}, {{0, 1}, {2, 3}})).size() == 1);
  CHECK(enumerate_admissible(diagram({0.0, kPi, kPi / 2, 3 * kPi / 2}, {{0, 1}, {2, 3}})).size() == 3);
  CHECK_THROWS_AS(enumerate_admissible(alternating(7)), Error);

  std::mt19937_64 eng(2024);
  int checked = 0;
  while (checked < 100) {
    const int n = 2 + checked % 3;
    ChordDiagram d = random_diagram(n, eng);
    try {
      validate(d);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    const auto base = enumerate_admissible(d);
    ChordDiagram turned = d;
    for (double& a : turned.angles) a += 1.234;
    CHECK(enumerate_admissible(turned).size() == base.size());
  }
}

TEST_CASE("monotonicity and uniqueness of the crossing number") {
  const MonotonicityReport two = verify_monotonicity_uniqueness(diagram({0.0, kPi, kPi / 2, 3 * kPi / 2}, {{0, 1}, {2, 3}}));
  CHECK(two.pass());
  CHECK(two.configurations == 3);

  std::mt19937_64 eng(7);
  int checked = 0;
  while (checked < 100) {
    ChordDiagram d = random_diagram(3 + checked % 2, eng);
    try {
      validate(d);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    const MonotonicityReport rep = verify_monotonicity_uniqueness(d);
    CHECK(rep.pass());
    CHECK(rep.all_cross_admissible);
    // independent recount of the induced crossing numbers
    for (const AdmissibleConfig& c : enumerate_admissible(d)) {
      const int induced = brute_crossings(d, c.strands);
      CHECK(induced <= rep.m);
      const bool all_cross = std::all_of(c.config.begin(), c.config.end(), [](Pattern p) { return p == Pattern::cross; });
      CHECK((induced == rep.m) == all_cross);
    }
  }
}

TEST_CASE("connecting configurations") {
  CHECK(count_connecting_configs(1, 1) == 2);
  CHECK(count_connecting_configs(2, 2) == 8);
  std::uint64_t fact = 1;
  for (int n = 1; n <= 4; ++n) {
    fact *= n;
    CHECK(count_connecting_configs(n, n) == (std::uint64_t{1} << n) * fact);
  }
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) CHECK(count_connecting_configs(n, k) == chains_recursive(n, k));
  }
  CHECK_THROWS_AS(count_connecting_configs(9, 1), Error);
  CHECK_THROWS_AS(count_connecting_configs(3, 4), Error);
}
