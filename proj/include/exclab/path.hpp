#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "exclab/common.hpp"

namespace exclab {

enum class PathKind { bridge, excursion };

/// A time-discretized planar path. When `tail_jump` is set the last point was
/// appended without sampling the stretch before it, so the final segment is not
/// part of the trace; `head_jump` is the same for the first segment.
struct PolyPath {
  std::vector<Complex> points;
  double dt = 0.0;
  PathKind kind = PathKind::excursion;
  bool head_jump = false;
  bool tail_jump = false;

  /// Traced segments are [first_segment(), end_segment()); segment i joins
  /// points i and i+1.
  std::size_t first_segment() const { return head_jump ? 1 : 0; }
  std::size_t end_segment() const {
    if (points.size() < 2) return 0;
    const std::size_t e = points.size() - 1 - (tail_jump ? 1 : 0);
    return std::max(e, first_segment());
  }
  double max_spacing() const;
  PolyPath reversed() const;
};

/// Receives path points as they are generated.
class PathSink {
 public:
  virtual ~PathSink() = default;
  /// Returning false asks the sampler to stop early.
  virtual bool push(Complex z) = 0;
  /// Final endpoint reached without tracing the path up to it.
  virtual void jump(Complex z) = 0;
};

class CollectingSink : public PathSink {
 public:
  explicit CollectingSink(PolyPath& path) : path_(path) {}
  bool push(Complex z) override {
    path_.points.push_back(z);
    return true;
  }
  void jump(Complex z) override {
    path_.points.push_back(z);
    path_.tail_jump = true;
  }

 private:
  PolyPath& path_;
};

struct HitRecord {
  double delta = 0.0;
  bool hit = false;
  Complex x_first{};
  Complex y_last{};
};

/// Parameters t in [0,1] where segment p->q enters or leaves the open disk
/// |z| < radius, in increasing order. Points on the circle count as outside.
std::vector<double> segment_circle_params(Complex p, Complex q, double radius);

/// Whether the path meets the closed disk of radius 1 - delta, and if so its
/// first entry and last exit points on that circle.
HitRecord first_last_hit(const PolyPath& path, double delta);

/// Largest distance between two points of the traced part of the path.
double trace_diameter(const PolyPath& path);

}  // namespace exclab
