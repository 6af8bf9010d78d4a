#include <doctest.h>

#include <cmath>
#include <vector>

#include "exclab/process.hpp"
#include "exclab/sampler.hpp"
#include "exclab/tube.hpp"

using namespace exclab;

namespace {

PolyPath polyline(const std::vector<Complex>& corners, double spacing = 0.005) {
  PolyPath p;
  p.points.push_back(corners.front());
  for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
    const Complex a = corners[i], b = corners[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
    for (int k = 1; k <= n; ++k) p.points.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }
  return p;
}

PolyPath rotate(const PolyPath& p, double angle) {
  PolyPath q = p;
  for (Complex& z : q.points) z *= unit(angle);
  return q;
}

bool same_report(const EventReport& a, const EventReport& b) {
  return a.containment == b.containment && a.crossings == b.crossings && a.connectivity == b.connectivity &&
         a.event_crossing_form == b.event_crossing_form && a.event_topological_form == b.event_topological_form &&
         a.excursions_hitting == b.excursions_hitting;
}

}  // namespace

TEST_CASE("tube arcs") {
  const Tube t = build_tube_angles(0.0, kPi, 0.1, 0.5);
  CHECK(t.on_arc_a(0.0));
  CHECK(t.on_arc_b(kPi));
  CHECK_FALSE(t.on_arc_a(kPi));
  // symmetric about the chord
  CHECK(std::abs(std::remainder(t.arc_a_lo + 0.5 * t.arc_a_width, kTwoPi)) < 1e-12);
  CHECK(std::abs(std::remainder(t.arc_b_lo + 0.5 * t.arc_b_width - kPi, kTwoPi)) < 1e-12);
  CHECK(t.arc_a_width == doctest::Approx(t.arc_b_width).epsilon(1e-12));
  // exact arc: half-width asin(eps / (2R))
  CHECK(t.arc_a_width == doctest::Approx(2 * std::asin(0.05 / 0.5)).epsilon(1e-12));

  const Tube thin = build_tube_angles(1.0, 1.0 + kPi, 1e-3, 0.3);
  CHECK(thin.radius * thin.arc_a_width / 1e-3 == doctest::Approx(1.0).epsilon(0.01));

  const Tube off = build_tube_angles(0.2, 2.0, 0.05, 0.4);
  CHECK(off.on_arc_a(0.2));
  CHECK(off.on_arc_b(2.0));
  CHECK(std::abs(off.a - 0.6 * unit(0.2)) < 1e-12);
}

TEST_CASE("too-wide rejection on a grid") {
  for (double delta : {0.2, 0.5, 0.85}) {
    const double R = 1.0 - delta;
    for (double span : {0.3, 1.0, 2.0, 2.8, kPi}) {
      for (double eps : {0.01, 0.05, 0.1, 0.2, 0.29, 0.5, 0.9}) {
        // distance from the centre to the chord subtending `span`
        const double d = R * std::cos(0.5 * span);
        const bool wide = d + 0.5 * eps >= R;
        bool threw = false;
        try {
          build_tube_angles(0.7, 0.7 + span, eps, delta);
        } catch (const Error& e) {
          threw = e.code() == ErrorCode::too_wide;
        }
        CHECK(threw == wide);
      }
    }
  }
  CHECK_THROWS_AS(build_tube(Complex(0.5, 0.0), Complex(0.5, 0.0), 0.1, 0.5), Error);
  CHECK_THROWS_AS(build_tube(Complex(0.9, 0.0), Complex(-0.5, 0.0), 0.1, 0.5), Error);
}

TEST_CASE("tube systems: sub-tubes and crossroads") {
  const double eps = 0.05, delta = 0.3;
  SUBCASE("non-crossing") {
    const TubeSystem s = build_system({build_tube_angles(0.0, 2.0, eps, delta), build_tube_angles(3.0, 5.0, eps, delta)});
    CHECK(s.subtubes().size() == 2);
    CHECK(s.crossroads().empty());
    CHECK_FALSE(s.crossing(0, 1));
  }
  SUBCASE("two crossing") {
    const TubeSystem s =
        build_system({build_tube_angles(0.0, kPi, eps, delta), build_tube_angles(kPi / 2, 3 * kPi / 2, eps, delta)});
    CHECK(s.subtubes().size() == 4);
    CHECK(s.crossroads().size() == 1);
    CHECK(s.crossing(0, 1));
  }
  SUBCASE("three pairwise crossing") {
    std::vector<Tube> tubes{build_tube_angles(0.0, 3.3, eps, delta), build_tube_angles(1.1, 4.0, eps, delta),
                            build_tube_angles(2.0, 5.3, eps, delta)};
    const TubeSystem s = build_system(tubes);
    CHECK(s.crossroads().size() == 3);
    CHECK(s.subtubes().size() == 9);
    // every crossroad touches four sub-tube ends
    std::vector<int> ends(s.crossroads().size(), 0);
    for (const SubTube& st : s.subtubes()) {
      for (int c : st.crossroad) {
        if (c >= 0) ++ends[c];
      }
    }
    for (int e : ends) CHECK(e == 4);
    // sub-tube lengths add up to chord length minus the crossroad spans eps / |sin angle|
    for (int i = 0; i < 3; ++i) {
      double total = 0.0;
      for (int k = 0; k < s.subtube_count(i); ++k) total += s.subtubes()[s.subtube_id(i, k)].centerline_length();
      double spans = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (j != i) spans += eps / std::abs(cross(tubes[i].dir, tubes[j].dir));
      }
      CHECK(total == doctest::Approx(tubes[i].length() - spans).epsilon(1e-12));
    }
    // points off every tube, outside the disk, and on a centre line
    CHECK(s.locate(Complex(0.0, 0.69)).kind == Location::violation);
    CHECK(s.locate(Complex(0.0, 0.71)).kind == Location::outside);
    CHECK(s.locate(0.3 * tubes[0].a + 0.7 * tubes[0].b).kind == Location::subtube);
  }
  SUBCASE("concurrent chords are rejected") {
    CHECK_THROWS_AS(build_system({build_tube_angles(0.0, kPi, eps, delta), build_tube_angles(1.0, 1.0 + kPi, eps, delta),
                                  build_tube_angles(2.0, 2.0 + kPi, eps, delta)}),
                    Error);
  }
  SUBCASE("overlapping non-crossing tubes are rejected") {
    CHECK_THROWS_AS(build_system({build_tube_angles(0.0, 2.0, eps, delta), build_tube_angles(0.01, 2.01, eps, delta)}),
                    Error);
  }
}

TEST_CASE("sub-path census") {
  const Tube t = build_tube_angles(0.0, kPi, 0.1, 0.5);
  const PolyPath straight = polyline({1.0, -1.0});
  Census c = tube_subpath_census(straight, t);
  CHECK(c.a_to_b == 1);
  CHECK(c.b_to_a == 0);
  CHECK(c.violations == 0);
  c = tube_subpath_census(straight.reversed(), t);
  CHECK(c.a_to_b == 0);
  CHECK(c.b_to_a == 1);

  // in through [a], back out through [a]
  const PolyPath ret = polyline({Complex(1.0, 0.0), Complex(0.2, 0.02), Complex(1.0, -0.02)});
  c = tube_subpath_census(ret, t);
  CHECK(c.return_a == 1);
  CHECK(c.a_to_b + c.b_to_a + c.violations == 0);

  // leaves through a long side
  const PolyPath side = polyline({Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 1.0)});
  c = tube_subpath_census(side, t);
  CHECK(c.violations == 1);

  // enters outside the tube
  const PolyPath miss = polyline({Complex(0.0, 1.0), Complex(0.0, -1.0)});
  CHECK(tube_subpath_census(miss, t).violations >= 1);

  // there and back through the annulus: two crossings
  const PolyPath twice = polyline({Complex(1.0, 0.0), Complex(-0.7, 0.0), Complex(-0.7, 0.7), Complex(0.7, 0.7),
                                   Complex(0.7, 0.01), Complex(-1.0, 0.01)});
  c = tube_subpath_census(twice, t);
  CHECK(c.a_to_b == 2);
}

TEST_CASE("event evaluation on synthetic paths") {
  const double eps = 0.1, delta = 0.5;
  const TubeSystem one = build_system({build_tube_angles(0.0, kPi, eps, delta)});
  SausageOptions sausage;
  sausage.r = 0.02;

  SUBCASE("empty sample") {
    const EventReport rep = evaluate_event({}, one, sausage);
    CHECK(rep.containment);
    CHECK(rep.crossings == std::vector<int>{0});
    CHECK_FALSE(rep.event_crossing_form);
    CHECK_FALSE(rep.event_topological_form);
  }
  SUBCASE("a chord-tracing path") {
    const EventReport rep = evaluate_event({polyline({1.0, -1.0})}, one, sausage);
    CHECK(rep.containment);
    CHECK(rep.event_crossing_form);
    CHECK(rep.event_topological_form);
    CHECK(rep.excursions_hitting == 1);
  }
  SUBCASE("two parallel crossings") {
    const std::vector<PolyPath> paths{polyline({Complex(1.0, 0.03), Complex(-1.0, 0.03)}),
                                      polyline({Complex(1.0, -0.03), Complex(-1.0, -0.03)})};
    const EventReport rep = evaluate_event(paths, one, sausage);
    CHECK(rep.containment);
    CHECK(rep.crossings == std::vector<int>{2});
    CHECK_FALSE(rep.event_crossing_form);
    CHECK(rep.connectivity);
    CHECK_FALSE(rep.event_topological_form);
  }
  SUBCASE("a path missing the inner disk") {
    const EventReport rep = evaluate_event({polyline({unit(0.0), 0.8 * unit(0.5), unit(1.0)})}, one, sausage);
    CHECK(rep.containment);
    CHECK(rep.excursions_hitting == 0);
    CHECK_FALSE(rep.event_crossing_form);
  }
  SUBCASE("two crossing tubes, one path each") {
    const TubeSystem two =
        build_system({build_tube_angles(0.0, kPi, eps, delta), build_tube_angles(kPi / 2, 3 * kPi / 2, eps, delta)});
    const std::vector<PolyPath> paths{polyline({1.0, -1.0}), polyline({Complex(0, 1), Complex(0, -1)})};
    const EventReport rep = evaluate_event(paths, two, sausage);
    CHECK(rep.crossings == std::vector<int>{1, 1, 1, 1});
    CHECK(rep.event_crossing_form);
    CHECK(rep.event_topological_form);
    // a single path turning at the crossroad crosses two sub-tubes only
    const EventReport turn = evaluate_event({polyline({1.0, 0.0, Complex(0, -1)})}, two, sausage);
    CHECK(turn.containment);
    CHECK_FALSE(turn.event_crossing_form);
  }
  SUBCASE("sparse paths need densification") {
    SausageOptions strict = sausage;
    strict.densify = false;
    CHECK_THROWS_AS(evaluate_event({polyline({1.0, -1.0}, 0.05)}, one, strict), Error);
  }
}

TEST_CASE("event evaluation is invariant under reversal, relabelling and joint rotation") {
  const double eps = 0.3, delta = 0.7;
  const TubeSystem sys =
      build_system({build_tube_angles(0.0, kPi, eps, delta), build_tube_angles(kPi / 2, 3 * kPi / 2, eps, delta)});
  const double rot = 0.7;
  const TubeSystem sys_rot = build_system(
      {build_tube_angles(rot, kPi + rot, eps, delta), build_tube_angles(kPi / 2 + rot, 3 * kPi / 2 + rot, eps, delta)});
  const EndpointPairSet pairs = make_fixed_pairs({{0.0, kPi}, {kPi / 2, 3 * kPi / 2}});
  SausageOptions sausage;
  sausage.r = 0.04;
  int positives = 0;
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    ExcursionOptions opt;
    opt.dt = 1e-4;
    const ExcursionProcessSample s = sample_process(pairs, opt, 77, rep);
    std::vector<PolyPath> paths = s.paths();
    const EventReport base = evaluate_event(paths, sys, sausage);
    positives += base.event_crossing_form;

    std::vector<PolyPath> rev{paths[1].reversed(), paths[0].reversed()};
    CHECK(same_report(base, evaluate_event(rev, sys, sausage)));

    std::vector<PolyPath> turned{rotate(paths[0], rot), rotate(paths[1], rot)};
    CHECK(same_report(base, evaluate_event(turned, sys_rot, sausage)));

    // streaming evaluation with early stop never contradicts the full evaluation
    EventEvaluator ev(sys);
    for (const PolyPath& p : paths) {
      ev.begin_path();
      for (Complex z : p.points) {
        if (!ev.push(z)) break;
      }
    }
    CHECK(ev.event() == base.event_crossing_form);
  }
  MESSAGE("event-positive samples: " << positives);
}
