#include "exclab/chords.hpp"

#include <cmath>
#include <functional>

namespace exclab {

namespace {

double orient(Complex a, Complex b, Complex c) { return cross(b - a, c - a); }

// Chords on a circle cross iff their endpoints interleave.
bool interleaved(const ChordDiagram& d, int i, int j) {
  auto pos = [&](int k) { return std::fmod(d.angles[k], kTwoPi) + (d.angles[k] < 0 ? kTwoPi : 0.0); };
  double a = pos(d.chords[i].first), b = pos(d.chords[i].second);
  if (a > b) std::swap(a, b);
  const double c = pos(d.chords[j].first), e = pos(d.chords[j].second);
  const bool c_in = c > a && c < b, e_in = e > a && e < b;
  return c_in != e_in;
}

Complex chord_intersection(const ChordDiagram& d, int i, int j) {
  const Complex p = d.point(d.chords[i].first), r = d.point(d.chords[i].second) - p;
  const Complex q = d.point(d.chords[j].first), s = d.point(d.chords[j].second) - q;
  const double t = cross(q - p, s) / cross(r, s);
  return p + t * r;
}

// Parameter of a point along chord i, 0 at its first endpoint.
double chord_param(const ChordDiagram& d, int i, Complex z) {
  const Complex p = d.point(d.chords[i].first), r = d.point(d.chords[i].second) - p;
  return dot(z - p, r) / std::norm(r);
}

}  // namespace

std::string pattern_name(Pattern p) {
  switch (p) {
    case Pattern::smooth_a: return "A";
    case Pattern::smooth_b: return "B";
    case Pattern::cross: return "X";
  }
  return "?";
}

void validate(const ChordDiagram& d) {
  const int n2 = static_cast<int>(d.angles.size());
  if (n2 != 2 * d.n()) throw Error(ErrorCode::domain, "need exactly two points per chord");
  std::vector<int> seen(n2, 0);
  for (auto [u, v] : d.chords) {
    if (u < 0 || v < 0 || u >= n2 || v >= n2 || u == v) throw Error(ErrorCode::domain, "bad chord index");
    ++seen[u];
    ++seen[v];
  }
  for (int s : seen) {
    if (s != 1) throw Error(ErrorCode::domain, "chords must form a perfect matching");
  }
  for (int a = 0; a < n2; ++a) {
    for (int b = a + 1; b < n2; ++b) {
      if (std::abs(d.point(a) - d.point(b)) < 1e-12) throw Error(ErrorCode::coincident_points, "repeated angle");
    }
  }
  const int n = d.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!interleaved(d, i, j)) continue;
      const Complex z = chord_intersection(d, i, j);
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const Complex p = d.point(d.chords[k].first), q = d.point(d.chords[k].second);
        if (std::abs(orient(p, q, z)) < 1e-12 * std::abs(q - p)) {
          throw Error(ErrorCode::general_position, "three chords meet in a point");
        }
      }
    }
  }
}

int crossing_number(const ChordDiagram& d) {
  int m = 0;
  for (int i = 0; i < d.n(); ++i) {
    for (int j = i + 1; j < d.n(); ++j) m += interleaved(d, i, j) ? 1 : 0;
  }
  return m;
}

std::vector<std::pair<int, int>> crossroads(const ChordDiagram& d) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < d.n(); ++i) {
    for (int j = i + 1; j < d.n(); ++j) {
      if (interleaved(d, i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

ResolutionResult resolve(const ChordDiagram& d, const CrossingConfig& config) {
  const int n = d.n();
  const auto cr = crossroads(d);
  const int m = static_cast<int>(cr.size());
  if (static_cast<int>(config.size()) != m) throw Error(ErrorCode::domain, "configuration length must equal m");

  // Sub-segments: chord i is cut by its crossroads into pieces seg_base[i] + 0..k_i.
  std::vector<std::vector<std::pair<double, int>>> along(n);  // (param, crossroad)
  for (int c = 0; c < m; ++c) {
    const auto [i, j] = cr[c];
    const Complex z = chord_intersection(d, i, j);
    along[i].emplace_back(chord_param(d, i, z), c);
    along[j].emplace_back(chord_param(d, j, z), c);
  }
  std::vector<int> seg_base(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(along[i].begin(), along[i].end());
    seg_base[i + 1] = seg_base[i] + static_cast<int>(along[i].size()) + 1;
  }
  const int nseg = seg_base[n];

  // Half-edge h = 2*seg + side (side 0 towards the chord's first endpoint).
  // partner[h] is the half-edge joined to h at a crossroad, or -(point+1) at the boundary.
  std::vector<int> partner(2 * nseg, 0);
  for (int i = 0; i < n; ++i) {
    partner[2 * seg_base[i]] = -(d.chords[i].first + 1);
    partner[2 * (seg_base[i + 1] - 1) + 1] = -(d.chords[i].second + 1);
  }
  // half-edge of chord i at crossroad c on the given side of the crossing
  auto half_at = [&](int i, int c, int side) {
    int k = 0;
    while (along[i][k].second != c) ++k;
    // segment k ends at the crossing (its side 1), segment k+1 starts there (side 0)
    return side > 0 ? 2 * (seg_base[i] + k + 1) : 2 * (seg_base[i] + k) + 1;
  };
  for (int c = 0; c < m; ++c) {
    const auto [i, j] = cr[c];
    const Complex di = d.point(d.chords[i].second) - d.point(d.chords[i].first);
    const Complex dj = d.point(d.chords[j].second) - d.point(d.chords[j].first);
    const int s = cross(di, dj) > 0.0 ? 1 : -1;
    const int e[4] = {half_at(i, c, 1), half_at(j, c, s), half_at(i, c, -1), half_at(j, c, -s)};
    auto join = [&](int a, int b) {
      partner[e[a]] = e[b];
      partner[e[b]] = e[a];
    };
    switch (config[c]) {
      case Pattern::cross: join(0, 2); join(1, 3); break;
      case Pattern::smooth_a: join(0, 1); join(2, 3); break;
      case Pattern::smooth_b: join(1, 2); join(3, 0); break;
    }
  }

  ResolutionResult res;
  std::vector<char> used(nseg, 0);
  int consumed = 0;
  std::vector<int> start_half(2 * n, -1);
  for (int h = 0; h < 2 * nseg; ++h) {
    if (partner[h] < 0) start_half[-partner[h] - 1] = h;
  }
  // walk from half-edge h through its segment; returns the half-edge reached
  auto walk = [&](int h, auto&& on_end) {
    for (;;) {
      const int seg = h / 2;
      if (used[seg]) throw Error(ErrorCode::inconsistent_arrangement, "sub-segment visited twice");
      used[seg] = 1;
      ++consumed;
      const int other = h ^ 1;
      if (partner[other] < 0) return on_end(-partner[other] - 1);
      h = partner[other];
      if (used[h / 2]) return on_end(-1);
    }
  };
  std::vector<char> matched(2 * n, 0);
  for (int p = 0; p < 2 * n; ++p) {
    if (matched[p]) continue;
    walk(start_half[p], [&](int q) {
      if (q < 0) throw Error(ErrorCode::inconsistent_arrangement, "strand closed on itself");
      matched[p] = matched[q] = 1;
      res.strands.emplace_back(std::min(p, q), std::max(p, q));
    });
  }
  for (int seg = 0; seg < nseg; ++seg) {
    if (used[seg]) continue;
    ++res.loops;
    walk(2 * seg, [&](int q) {
      if (q >= 0) throw Error(ErrorCode::inconsistent_arrangement, "loop reached the boundary");
    });
  }
  if (consumed != n + 2 * m) throw Error(ErrorCode::inconsistent_arrangement, "sub-segment count mismatch");
  std::sort(res.strands.begin(), res.strands.end());
  return res;
}

std::vector<AdmissibleConfig> enumerate_admissible(const ChordDiagram& d) {
  const int m = crossing_number(d);
  if (m > kMaxEnumeratedCrossings) throw Error(ErrorCode::size, "too many crossroads to enumerate");
  std::vector<AdmissibleConfig> out;
  CrossingConfig cfg(m, Pattern::smooth_a);
  std::uint64_t total = 1;
  for (int k = 0; k < m; ++k) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int k = m - 1; k >= 0; --k) {
      cfg[k] = static_cast<Pattern>(c % 3);
      c /= 3;
    }
    ResolutionResult r = resolve(d, cfg);
    if (r.admissible()) out.push_back({cfg, std::move(r.strands)});
  }
  return out;
}

MonotonicityReport verify_monotonicity_uniqueness(const ChordDiagram& d) {
  validate(d);
  MonotonicityReport rep;
  rep.m = crossing_number(d);
  if (rep.m > kMaxEnumeratedCrossings) throw Error(ErrorCode::size, "too many crossroads to enumerate");
  rep.configurations = 1;
  for (int k = 0; k < rep.m; ++k) rep.configurations *= 3;
  const auto admissible = enumerate_admissible(d);
  rep.admissible = admissible.size();
  const CrossingConfig all_cross(rep.m, Pattern::cross);
  for (const auto& a : admissible) {
    ChordDiagram induced{d.angles, a.strands};
    const int mi = crossing_number(induced);
    const bool is_all_cross = a.config == all_cross;
    if (is_all_cross) rep.all_cross_admissible = true;
    if (mi > rep.m) {
      rep.monotone = false;
      rep.witnesses.push_back(a.config);
    } else if (mi == rep.m && !is_all_cross) {
      rep.unique = false;
      rep.witnesses.push_back(a.config);
    }
  }
  return rep;
}

std::uint64_t count_connecting_configs(int n, int k) {
  if (!(1 <= k && k <= n && n <= 8)) throw Error(ErrorCode::domain, "need 1 <= k <= n <= 8");
  // Endpoint 2b and 2b+1 belong to bridge b. Each endpoint is either free
  // (an excursion end on the circle) or glued to an endpoint of another bridge.
  const int ne = 2 * n;
  std::vector<int> mate(ne, -2);  // -2 unassigned, -1 free
  std::vector<int> parent(n);
  std::uint64_t count = 0;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : find(parent[x]); };
  std::function<void(int, int)> rec = [&](int e, int components) {
    while (e < ne && mate[e] != -2) ++e;
    if (e == ne) {
      if (components == k) ++count;
      return;
    }
    mate[e] = -1;
    rec(e + 1, components);
    for (int f = e + 1; f < ne; ++f) {
      if (mate[f] != -2 || f / 2 == e / 2) continue;
      const int ra = find(e / 2), rb = find(f / 2);
      if (ra == rb) continue;  // would close a loop
      mate[e] = f;
      mate[f] = e;
      parent[ra] = rb;
      rec(e + 1, components - 1);
      parent[ra] = ra;
      mate[f] = -2;
    }
    mate[e] = -2;
  };
  for (int b = 0; b < n; ++b) parent[b] = b;
  rec(0, n);
  // each chain system gives k excursions, ordered in k! ways and oriented in 2^k
  std::uint64_t factor = 1;
  for (int j = 2; j <= k; ++j) factor *= static_cast<std::uint64_t>(j);
  return count * factor * (std::uint64_t{1} << k);
}

}  // namespace exclab
