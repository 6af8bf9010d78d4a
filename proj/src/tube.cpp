#include "exclab/tube.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace exclab {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

// Point where lateral coordinates of two tubes take the given values.
Complex solve_lines(const Tube& ti, double ci, const Tube& tj, double cj) {
  // dot(z, n_i) = offset_i + ci, dot(z, n_j) = offset_j + cj
  const double a11 = ti.normal.real(), a12 = ti.normal.imag();
  const double a21 = tj.normal.real(), a22 = tj.normal.imag();
  const double b1 = ti.offset + ci, b2 = tj.offset + cj;
  const double det = a11 * a22 - a12 * a21;
  return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

double orient(Complex a, Complex b, Complex c) { return cross(b - a, c - a); }

// Distance from the origin to a convex quadrilateral given in cyclic order.
double origin_distance(const std::array<Complex, 4>& q) {
  bool inside = true;
  double sgn = 0.0;
  double best = 1e300;
  for (int k = 0; k < 4; ++k) {
    const Complex p = q[k], r = q[(k + 1) % 4];
    const double o = orient(p, r, 0.0);
    if (sgn == 0.0) sgn = o;
    if (o * sgn < 0.0) inside = false;
    const Complex d = r - p;
    const double t = std::clamp(-dot(p, d) / std::norm(d), 0.0, 1.0);
    best = std::min(best, std::abs(p + t * d));
  }
  return inside ? 0.0 : best;
}

std::array<Complex, 4> strip_intersection(const Tube& ti, const Tube& tj) {
  const double h = 0.5 * ti.eps;
  return {solve_lines(ti, -h, tj, -h), solve_lines(ti, h, tj, -h), solve_lines(ti, h, tj, h),
          solve_lines(ti, -h, tj, h)};
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

}  // namespace

bool Tube::on_arc_a(double angle) const { return wrap_angle(angle - arc_a_lo) <= arc_a_width; }
bool Tube::on_arc_b(double angle) const { return wrap_angle(angle - arc_b_lo) <= arc_b_width; }

Tube build_tube(Complex a, Complex b, double eps, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::domain, "delta must lie in (0,1)");
  if (!(eps > 0.0)) throw Error(ErrorCode::domain, "tube width must be positive");
  Tube t;
  t.radius = 1.0 - delta;
  if (std::abs(std::abs(a) - t.radius) > 1e-9 || std::abs(std::abs(b) - t.radius) > 1e-9) {
    throw Error(ErrorCode::domain, "tube endpoints must lie on the inner circle");
  }
  if (std::abs(a - b) < kCoincidentTol) throw Error(ErrorCode::coincident_points, "tube endpoints coincide");
  t.a = a;
  t.b = b;
  t.eps = eps;
  t.delta = delta;
  t.dir = (b - a) / std::abs(b - a);
  t.normal = t.dir * Complex(0.0, 1.0);
  t.offset = dot(a, t.normal);
  if (std::abs(t.offset) + 0.5 * eps >= t.radius) {
    throw Error(ErrorCode::too_wide, "tube too wide for its chord: d + eps/2 >= 1 - delta");
  }
  auto arc = [&](double sgn, double ref_angle, double& lo, double& width) {
    Complex ends[2];
    for (int s = 0; s < 2; ++s) {
      const double c = t.offset + (s == 0 ? -0.5 : 0.5) * eps;
      const double along = std::sqrt(t.radius * t.radius - c * c);
      ends[s] = t.normal * c + t.dir * (sgn * along);
    }
    double lo0 = std::arg(ends[0]), hi0 = std::arg(ends[1]);
    width = wrap_angle(hi0 - lo0);
    lo = lo0;
    if (wrap_angle(ref_angle - lo) > width) {
      lo = hi0;
      width = wrap_angle(lo0 - hi0);
    }
  };
  arc(-1.0, std::arg(a), t.arc_a_lo, t.arc_a_width);
  arc(1.0, std::arg(b), t.arc_b_lo, t.arc_b_width);
  return t;
}

Tube build_tube_angles(double angle_a, double angle_b, double eps, double delta) {
  const double r = 1.0 - delta;
  return build_tube(std::polar(r, angle_a), std::polar(r, angle_b), eps, delta);
}

Census tube_subpath_census(const PolyPath& path, const Tube& tube) {
  Census c;
  const double R = tube.radius;
  enum Side { none, side_a, side_b, side_bad };
  auto arc_side = [&](Complex p) {
    if (!tube.in_strip(p)) return side_bad;
    return tube.axial(p) < 0.5 * tube.length() ? side_a : side_b;
  };
  bool inside = false;
  Side entry = none;
  bool bad = false;
  auto finish = [&](Side exit) {
    if (bad || entry == side_bad || exit == side_bad) {
      ++c.violations;
    } else if (entry == side_a && exit == side_b) {
      ++c.a_to_b;
    } else if (entry == side_b && exit == side_a) {
      ++c.b_to_a;
    } else if (entry == side_a) {
      ++c.return_a;
    } else if (entry == side_b) {
      ++c.return_b;
    }
    bad = false;
    entry = none;
  };
  const std::size_t begin = path.first_segment(), end = path.end_segment();
  if (begin < end && std::abs(path.points[begin]) < R) {
    inside = true;
    bad = !tube.in_strip(path.points[begin]);
  }
  for (std::size_t i = begin; i < end; ++i) {
    const Complex p = path.points[i], q = path.points[i + 1];
    const auto ts = segment_circle_params(p, q, R);
    double t_prev = 0.0;
    for (std::size_t k = 0; k <= ts.size(); ++k) {
      const double t_next = k < ts.size() ? ts[k] : 1.0;
      if (inside && !tube.in_strip(p + 0.5 * (t_prev + t_next) * (q - p))) bad = true;
      if (k == ts.size()) break;
      const Complex bp = p + t_next * (q - p);
      if (inside) {
        finish(arc_side(bp));
        inside = false;
      } else {
        inside = true;
        entry = arc_side(bp);
      }
      t_prev = t_next;
    }
    if (inside && !tube.in_strip(q)) bad = true;
  }
  if (inside && bad) ++c.violations;
  return c;
}


TubeSystem::TubeSystem(std::vector<Tube> tubes) : tubes_(std::move(tubes)) {
  const int n = static_cast<int>(tubes_.size());
  if (n == 0) throw Error(ErrorCode::domain, "a tube system needs at least one tube");
  eps_ = tubes_[0].eps;
  delta_ = tubes_[0].delta;
  radius_ = tubes_[0].radius;
  for (const Tube& t : tubes_) {
    if (t.eps != eps_ || t.delta != delta_) throw Error(ErrorCode::domain, "tubes must share eps and delta");
  }
  cross_.assign(n, std::vector<bool>(n, false));
  crossroad_of_.assign(n, std::vector<int>(n, -1));
  partners_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Tube &ti = tubes_[i], &tj = tubes_[j];
      const Complex ends[4] = {ti.a, ti.b, tj.a, tj.b};
      for (int u = 0; u < 2; ++u) {
        for (int v = 2; v < 4; ++v) {
          if (std::abs(ends[u] - ends[v]) < 1e-9) throw Error(ErrorCode::general_position, "chords share an endpoint");
        }
      }
      const double o1 = orient(ti.a, ti.b, tj.a), o2 = orient(ti.a, ti.b, tj.b);
      const double o3 = orient(tj.a, tj.b, ti.a), o4 = orient(tj.a, tj.b, ti.b);
      const bool crosses = o1 * o2 < 0.0 && o3 * o4 < 0.0;
      const double par = cross(ti.dir, tj.dir);
      if (std::abs(par) < 1e-12) {
        const double gap = std::abs(ti.offset - tj.offset * dot(ti.normal, tj.normal));
        if (gap < eps_) throw Error(ErrorCode::general_position, "parallel tubes overlap");
        continue;
      }
      const auto quad = strip_intersection(ti, tj);
      if (crosses) {
        for (Complex c : quad) {
          if (std::abs(c) >= radius_) {
            throw Error(ErrorCode::general_position, "crossroad of tubes " + std::to_string(i) + " and " +
                                                         std::to_string(j) + " reaches the boundary circle");
          }
        }
        cross_[i][j] = cross_[j][i] = true;
        crossroad_of_[i][j] = crossroad_of_[j][i] = static_cast<int>(crossroads_.size());
        crossroads_.push_back({i, j, quad});
        partners_[i].push_back(j);
        partners_[j].push_back(i);
      } else if (origin_distance(quad) < radius_) {
        throw Error(ErrorCode::general_position, "non-crossing tubes " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " overlap inside the disk");
      }
    }
  }
  first_subtube_.assign(n + 1, 0);
  side_a_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    const Tube& ti = tubes_[i];
    auto& ps = partners_[i];
    // order partners along tube i
    std::vector<std::pair<double, double>> span(n);
    for (int j : ps) {
      const auto& q = crossroads_[crossroad_of_[i][j]].corners;
      double lo = 1e300, hi = -1e300;
      for (Complex c : q) {
        lo = std::min(lo, ti.axial(c));
        hi = std::max(hi, ti.axial(c));
      }
      span[j] = {lo, hi};
    }
    std::sort(ps.begin(), ps.end(), [&](int u, int v) { return span[u].first < span[v].first; });
    for (std::size_t k = 1; k < ps.size(); ++k) {
      if (span[ps[k]].first <= span[ps[k - 1]].second) {
        throw Error(ErrorCode::general_position, "crossroads on tube " + std::to_string(i) + " overlap");
      }
    }
    first_subtube_[i + 1] = first_subtube_[i] + static_cast<int>(ps.size()) + 1;
    double lo = 0.0;
    int prev_cr = -1;
    for (std::size_t k = 0; k <= ps.size(); ++k) {
      SubTube st;
      st.tube = i;
      st.index = static_cast<int>(k);
      st.crossroad[0] = prev_cr;
      st.axial_lo = lo;
      if (k < ps.size()) {
        const Tube& tj = tubes_[ps[k]];
        // centre line a + dir t meets lateral_j = +-eps/2
        const double l0 = tj.lateral(ti.a), slope = dot(ti.dir, tj.normal);
        const double t1 = (-0.5 * eps_ - l0) / slope, t2 = (0.5 * eps_ - l0) / slope;
        st.axial_hi = std::min(t1, t2);
        st.crossroad[1] = crossroad_of_[i][ps[k]];
        lo = std::max(t1, t2);
        prev_cr = st.crossroad[1];
        side_a_[i].push_back(sign_of(l0));
      } else {
        st.axial_hi = ti.length();
        st.crossroad[1] = -1;
      }
      subtubes_.push_back(st);
    }
  }
}

Location TubeSystem::locate(Complex z) const {
  if (std::norm(z) >= radius_ * radius_) return {Location::outside, -1};
  int hit[3];
  int count = 0;
  for (int i = 0; i < static_cast<int>(tubes_.size()) && count < 3; ++i) {
    if (tubes_[i].in_strip(z)) hit[count++] = i;
  }
  if (count == 0 || count == 3) return {Location::violation, -1};
  if (count == 2) {
    const int c = crossroad_of_[hit[0]][hit[1]];
    return c < 0 ? Location{Location::violation, -1} : Location{Location::crossroad, c};
  }
  const int i = hit[0];
  int k = 0;
  const auto& ps = partners_[i];
  for (std::size_t m = 0; m < ps.size(); ++m) {
    if (sign_of(tubes_[ps[m]].lateral(z)) != side_a_[i][m]) ++k;
  }
  return {Location::subtube, first_subtube_[i] + k};
}

double TubeSystem::end_distance(int s, int e, Complex z) const {
  const SubTube& st = subtubes_[s];
  const Tube& t = tubes_[st.tube];
  const int cr = st.crossroad[e];
  if (cr < 0) {
    const double ang = std::arg(z);
    const bool on = e == 0 ? t.on_arc_a(ang) : t.on_arc_b(ang);
    if (on) return std::max(0.0, radius_ - std::abs(z));
    const double lo = e == 0 ? t.arc_a_lo : t.arc_b_lo;
    const double w = e == 0 ? t.arc_a_width : t.arc_b_width;
    return std::min(std::abs(z - std::polar(radius_, lo)), std::abs(z - std::polar(radius_, lo + w)));
  }
  const Crossroad& c = crossroads_[cr];
  const Tube& other = tubes_[c.tube_i == st.tube ? c.tube_j : c.tube_i];
  return std::max(0.0, std::abs(other.lateral(z)) - 0.5 * eps_);
}

TubeSystem build_system(std::vector<Tube> tubes) { return TubeSystem(std::move(tubes)); }

// ---------------------------------------------------------------------------

EventEvaluator::EventEvaluator(const TubeSystem& system, bool stop_on_double_crossing)
    : sys_(system), stop_on_double_(stop_on_double_crossing), counts_(system.subtubes().size(), 0) {}

void EventEvaluator::begin_path() {
  has_prev_ = false;
  run_ = -1;
  hit_this_path_ = false;
}

int EventEvaluator::side(int s, Complex p) const {
  const SubTube& st = sys_.subtubes()[s];
  return sys_.tubes()[st.tube].axial(p) < st.axial_mid() ? -1 : 1;
}

void EventEvaluator::close_run(Complex exit_point) {
  if (run_ < 0) return;
  if (side(run_, exit_point) != run_entry_side_) {
    if (++counts_[run_] > 1) over_ = true;
  }
  run_ = -1;
}

void EventEvaluator::visit(Complex z, Location loc) {
  if (!hit_this_path_) {
    hit_this_path_ = true;
    ++hitting_;
  }
  switch (loc.kind) {
    case Location::violation:
    case Location::outside:
      violation_ = true;
      close_run(z);
      break;
    case Location::crossroad:
      close_run(z);
      break;
    case Location::subtube:
      if (run_ != loc.id) {
        close_run(z);
        run_ = loc.id;
        run_entry_side_ = side(run_, anchor_);
      }
      break;
  }
  anchor_ = z;
}

void EventEvaluator::touch_boundary(Complex bp) {
  if (!hit_this_path_) {
    hit_this_path_ = true;
    ++hitting_;
  }
  bool in_some = false;
  for (const Tube& t : sys_.tubes()) in_some = in_some || t.in_strip(bp);
  if (!in_some) violation_ = true;
  anchor_ = bp;
}

bool EventEvaluator::push(Complex z) {
  const double R = sys_.radius();
  if (!has_prev_) {
    has_prev_ = true;
    prev_ = z;
    if (std::norm(z) < R * R) {
      anchor_ = z;
      visit(z, sys_.locate(z));
    }
    return !failed();
  }
  const Complex p = prev_;
  prev_ = z;
  const auto ts = segment_circle_params(p, z, R);
  if (!ts.empty()) {
    bool inside = std::norm(p) < R * R;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const Complex bp = p + ts[k] * (z - p);
      if (inside) {
        close_run(bp);
        // a boundary exit point outside every tube means the path left sideways
        touch_boundary(bp);
        inside = false;
      } else {
        touch_boundary(bp);
        inside = true;
        if (k + 1 < ts.size()) {
          // dipped in and out within one segment
          const Complex mid = p + 0.5 * (ts[k] + ts[k + 1]) * (z - p);
          visit(mid, sys_.locate(mid));
        }
      }
    }
  }
  if (std::norm(z) < R * R) visit(z, sys_.locate(z));
  return !failed();
}

void EventEvaluator::jump(Complex) { has_prev_ = false; }

bool EventEvaluator::event() const {
  if (violation_) return false;
  return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c == 1; });
}


// ---------------------------------------------------------------------------

namespace {

struct Vertex {
  Complex z;
  int subtube;
};

// Points of the traced paths inside the inner disk, with boundary crossings,
// at spacing at most `spacing`.
std::vector<Complex> inner_points(const PolyPath& path, double R, double spacing, bool densify) {
  std::vector<Complex> out;
  const std::size_t begin = path.first_segment(), end = path.end_segment();
  if (begin < end && std::abs(path.points[begin]) < R) out.push_back(path.points[begin]);
  for (std::size_t i = begin; i < end; ++i) {
    const Complex p = path.points[i], q = path.points[i + 1];
    const bool p_in = std::abs(p) < R, q_in = std::abs(q) < R;
    const auto ts = segment_circle_params(p, q, R);
    if (!p_in && !q_in && ts.empty()) continue;
    const double len = std::abs(q - p);
    if (!densify && len > spacing) {
      throw Error(ErrorCode::resolution, "sausage radius below twice the path spacing");
    }
    const int pieces = densify ? std::max(1, static_cast<int>(std::ceil(len / spacing))) : 1;
    for (double t : ts) out.push_back(p + t * (q - p));
    for (int k = 1; k <= pieces; ++k) {
      const Complex z = p + (static_cast<double>(k) / pieces) * (q - p);
      if (std::abs(z) < R) out.push_back(z);
    }
  }
  return out;
}

class Grid {
 public:
  Grid(const std::vector<Complex>& pts, double cell) : pts_(pts), cell_(cell) {
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) cells_[key(pts[i])].push_back(i);
  }
  template <class F>
  void near(Complex z, double r, F f) const {
    const long long cx = coord(z.real()), cy = coord(z.imag());
    const double r2 = r * r;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int j : it->second) {
          if (std::norm(pts_[j] - z) <= r2) f(j);
        }
      }
    }
  }

 private:
  long long coord(double v) const { return static_cast<long long>(std::floor(v / cell_)); }
  static long long pack(long long x, long long y) { return (x << 32) ^ (y & 0xffffffffLL); }
  long long key(Complex z) const { return pack(coord(z.real()), coord(z.imag())); }
  const std::vector<Complex>& pts_;
  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

// BFS from the end-0 vertices; returns predecessor array or empty if end 1 is
// not reached. `removed` vertices are skipped.
bool ends_connected(const std::vector<Complex>& pts, const Grid& grid, double r, const std::vector<char>& at0,
                    const std::vector<char>& at1, const std::vector<char>& removed, std::vector<int>* pred,
                    int* reached) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> from(n, -2);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    if (at0[i] && !removed[i]) {
      from[i] = -1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (at1[v]) {
      if (pred) *pred = std::move(from);
      if (reached) *reached = v;
      return true;
    }
    grid.near(pts[v], r, [&](int j) {
      if (from[j] == -2 && !removed[j]) {
        from[j] = v;
        queue.push_back(j);
      }
    });
  }
  return false;
}

}  // namespace

TopologyReport topological_form(const std::vector<PolyPath>& paths, const TubeSystem& system,
                                const SausageOptions& opt) {
  TopologyReport rep;
  const double R = system.radius();
  const double r = opt.r;
  const int ns = static_cast<int>(system.subtubes().size());
  std::vector<std::vector<Complex>> per(ns);
  for (const PolyPath& path : paths) {
    for (Complex z : inner_points(path, R, 0.5 * r, opt.densify)) {
      Location loc = system.locate(z);
      if (loc.kind == Location::outside) {
        // boundary crossing point: belongs to the end sub-tube of the tube holding it
        loc.kind = Location::violation;
        for (int i = 0; i < static_cast<int>(system.tubes().size()); ++i) {
          const Tube& t = system.tubes()[i];
          if (!t.in_strip(z)) continue;
          const int k = t.axial(z) < 0.5 * t.length() ? 0 : system.subtube_count(i) - 1;
          loc = {Location::subtube, system.subtube_id(i, k)};
          break;
        }
      }
      if (loc.kind == Location::violation) {
        rep.containment = false;
        return rep;
      }
      if (loc.kind == Location::subtube) per[loc.id].push_back(z);
    }
  }
  rep.connected = true;
  rep.has_cut = true;
  for (int s = 0; s < ns; ++s) {
    const auto& pts = per[s];
    const int n = static_cast<int>(pts.size());
    if (n == 0) {
      rep.connected = rep.has_cut = false;
      return rep;
    }
    std::vector<char> at0(n), at1(n), none(n, 0);
    std::vector<double> d0(n), d1(n);
    for (int i = 0; i < n; ++i) {
      d0[i] = system.end_distance(s, 0, pts[i]);
      d1[i] = system.end_distance(s, 1, pts[i]);
      at0[i] = d0[i] <= 0.5 * r;
      at1[i] = d1[i] <= 0.5 * r;
    }
    const Grid grid(pts, r);
    std::vector<int> pred;
    int last = -1;
    if (!ends_connected(pts, grid, r, at0, at1, none, &pred, &last)) {
      rep.connected = rep.has_cut = false;
      return rep;
    }
    // a separating ball must meet every connecting path, in particular this one
    bool cut = false;
    std::vector<char> removed(n);
    for (int v = last; v >= 0 && !cut; v = pred[v]) {
      if (d0[v] <= 1.5 * r || d1[v] <= 1.5 * r) continue;
      std::fill(removed.begin(), removed.end(), 0);
      grid.near(pts[v], r, [&](int j) { removed[j] = 1; });
      if (!ends_connected(pts, grid, r, at0, at1, removed, nullptr, nullptr)) cut = true;
    }
    if (!cut) rep.has_cut = false;
  }
  return rep;
}

EventReport evaluate_event(const std::vector<PolyPath>& paths, const TubeSystem& system, const SausageOptions& opt) {
  EventReport rep;
  EventEvaluator ev(system, false);
  for (const PolyPath& path : paths) {
    ev.begin_path();
    for (std::size_t i = 0; i < path.points.size(); ++i) {
      const bool skipped = (path.head_jump && i == 1) || (path.tail_jump && i + 1 == path.points.size());
      if (skipped) ev.jump(path.points[i]);
      ev.push(path.points[i]);
    }
  }
  rep.containment = !ev.violation();
  rep.crossings = ev.crossings();
  rep.excursions_hitting = ev.excursions_hitting();
  rep.event_crossing_form = ev.event();
  if (rep.containment) {
    const TopologyReport topo = topological_form(paths, system, opt);
    rep.connectivity = topo.connected;
    rep.event_topological_form = topo.containment && topo.connected && topo.has_cut;
  }
  return rep;
}

}  // namespace exclab
