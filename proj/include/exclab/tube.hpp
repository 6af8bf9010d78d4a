#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "exclab/common.hpp"
#include "exclab/path.hpp"

namespace exclab {

/// The eps/2-neighbourhood of the line through a and b, cut by the disk
/// |z| < 1 - delta. a and b lie on that circle.
struct Tube {
  Complex a{}, b{};
  double eps = 0.0;
  double delta = 0.0;

  Complex dir{};     ///< unit vector from a to b
  Complex normal{};  ///< dir rotated by +90 degrees
  double offset = 0.0;
  double radius = 0.0;
  /// Arcs [a] and [b] of the circle inside the strip, as ccw angle intervals
  /// [lo, lo + width].
  double arc_a_lo = 0.0, arc_a_width = 0.0;
  double arc_b_lo = 0.0, arc_b_width = 0.0;

  double length() const { return std::abs(b - a); }
  double axial(Complex z) const { return dot(z - a, dir); }
  double lateral(Complex z) const { return dot(z, normal) - offset; }
  bool in_strip(Complex z, double slack = 1e-9) const { return std::abs(lateral(z)) < 0.5 * eps + slack; }
  bool on_arc_a(double angle) const;
  bool on_arc_b(double angle) const;
};

Tube build_tube(Complex a, Complex b, double eps, double delta);
/// Tube over the chord between boundary angles of the circle of radius 1 - delta.
Tube build_tube_angles(double angle_a, double angle_b, double eps, double delta);

/// Counts of the maximal sub-paths inside the disk |z| < 1 - delta.
struct Census {
  int a_to_b = 0;
  int b_to_a = 0;
  int return_a = 0;
  int return_b = 0;
  int violations = 0;
};

/// Classifies every visit of the path to the inner disk by where it enters
/// and leaves, or as a violation if it leaves the tube sideways or enters
/// outside it.
Census tube_subpath_census(const PolyPath& path, const Tube& tube);

struct Crossroad {
  int tube_i = 0, tube_j = 0;  ///< tube_i < tube_j
  std::array<Complex, 4> corners{};
};

struct SubTube {
  int tube = 0;
  int index = 0;  ///< position along the tube from a
  /// Crossroad at each end, or -1 for the boundary arc ([a] for end 0, [b] for end 1).
  std::array<int, 2> crossroad{-1, -1};
  /// Axial coordinates (along the tube) where the centre line enters and leaves.
  double axial_lo = 0.0, axial_hi = 0.0;
  double centerline_length() const { return axial_hi - axial_lo; }
  double axial_mid() const { return 0.5 * (axial_lo + axial_hi); }
};

/// Where a point of the plane lies relative to a tube system.
struct Location {
  enum Kind : std::uint8_t { outside, subtube, crossroad, violation };
  Kind kind = outside;
  int id = -1;
};

class TubeSystem {
 public:
  explicit TubeSystem(std::vector<Tube> tubes);

  const std::vector<Tube>& tubes() const { return tubes_; }
  const std::vector<SubTube>& subtubes() const { return subtubes_; }
  const std::vector<Crossroad>& crossroads() const { return crossroads_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double radius() const { return radius_; }
  /// Sub-tube id of tube i at position k.
  int subtube_id(int tube, int k) const { return first_subtube_[tube] + k; }
  int subtube_count(int tube) const { return first_subtube_[tube + 1] - first_subtube_[tube]; }
  bool crossing(int i, int j) const { return cross_[i][j]; }

  Location locate(Complex z) const;
  /// Distance from z to end e (0 or 1) of sub-tube s.
  double end_distance(int s, int e, Complex z) const;

 private:
  std::vector<Tube> tubes_;
  std::vector<SubTube> subtubes_;
  std::vector<Crossroad> crossroads_;
  std::vector<int> first_subtube_;
  std::vector<std::vector<bool>> cross_;
  std::vector<std::vector<int>> partners_;
  std::vector<std::vector<int>> crossroad_of_;
  std::vector<std::vector<int>> side_a_;
  double eps_ = 0.0, delta_ = 0.0, radius_ = 0.0;
};

TubeSystem build_system(std::vector<Tube> tubes);

/// Result of evaluating the tube event on a process sample.
struct EventReport {
  bool containment = true;
  std::vector<int> crossings;  ///< per sub-tube
  bool connectivity = false;
  bool event_crossing_form = false;
  bool event_topological_form = false;
  int excursions_hitting = 0;
};

/// Streams path points through a tube system and keeps the per-sub-tube
/// crossing counts. Paths are fed one at a time.
class EventEvaluator : public PathSink {
 public:
  explicit EventEvaluator(const TubeSystem& system, bool stop_on_double_crossing = true);

  void begin_path();
  bool push(Complex z) override;
  void jump(Complex z) override;

  /// True once the crossing-form event is known to fail.
  bool failed() const { return violation_ || (stop_on_double_ && over_); }
  bool violation() const { return violation_; }
  const std::vector<int>& crossings() const { return counts_; }
  int excursions_hitting() const { return hitting_; }
  bool event() const;

 private:
  void visit(Complex z, Location loc);
  void touch_boundary(Complex bp);
  void close_run(Complex exit_point);
  int side(int subtube, Complex p) const;

  const TubeSystem& sys_;
  bool stop_on_double_;
  std::vector<int> counts_;
  bool violation_ = false;
  bool over_ = false;
  int hitting_ = 0;
  bool hit_this_path_ = false;

  bool has_prev_ = false;
  Complex prev_{};
  Complex anchor_{};  ///< last point visited before the current one
  int run_ = -1;           ///< sub-tube of the current run, -1 if none
  int run_entry_side_ = 0;
};

struct SausageOptions {
  double r = 0.04;
  /// Interpolate paths so consecutive points are at most r/2 apart;
  /// without it the spacing precondition is enforced.
  bool densify = true;
};

struct TopologyReport {
  bool containment = true;
  bool connected = false;
  bool has_cut = false;
};

/// Sausage-graph check on each sub-tube: the r-neighbourhood graph of the
/// trace inside it joins its two ends, and some ball of radius r around a
/// trace vertex separates them.
TopologyReport topological_form(const std::vector<PolyPath>& paths, const TubeSystem& system,
                                const SausageOptions& opt);

/// Both event forms on a stored sample.
EventReport evaluate_event(const std::vector<PolyPath>& paths, const TubeSystem& system, const SausageOptions& opt);

}  // namespace exclab
