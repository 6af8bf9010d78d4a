#include "exclab/path.hpp"

#include <algorithm>
#include <cmath>

namespace exclab {

double PolyPath::max_spacing() const {
  double m = 0.0;
  for (std::size_t i = first_segment(); i < end_segment(); ++i) m = std::max(m, std::abs(points[i + 1] - points[i]));
  return m;
}

PolyPath PolyPath::reversed() const {
  PolyPath out = *this;
  std::reverse(out.points.begin(), out.points.end());
  std::swap(out.head_jump, out.tail_jump);
  return out;
}

std::vector<double> segment_circle_params(Complex p, Complex q, double radius) {
  const double r2 = radius * radius;
  const bool in_p = std::norm(p) < r2, in_q = std::norm(q) < r2;
  if (in_p && in_q) return {};
  const Complex d = q - p;
  const double a = std::norm(d);
  if (a == 0.0) return {};
  const double b = dot(p, d);
  const double disc = b * b - a * (std::norm(p) - r2);
  if (disc <= 0.0) return {};
  const double s = std::sqrt(disc);
  const double t1 = std::clamp((-b - s) / a, 0.0, 1.0), t2 = std::clamp((-b + s) / a, 0.0, 1.0);
  if (!in_p && in_q) return {t1};
  if (in_p && !in_q) return {t2};
  const double mid = -b / a;
  if (mid > 0.0 && mid < 1.0 && t1 < t2) return {t1, t2};
  return {};
}

HitRecord first_last_hit(const PolyPath& path, double delta) {
  HitRecord rec;
  rec.delta = delta;
  const double radius = 1.0 - delta;
  const std::size_t begin = path.first_segment(), end = path.end_segment();
  if (begin == end) return rec;
  auto entry = [&](std::size_t i) -> std::optional<Complex> {
    const Complex p = path.points[i], q = path.points[i + 1];
    if (std::abs(p) <= radius) return p;
    auto ts = segment_circle_params(p, q, radius);
    if (ts.empty()) return std::nullopt;
    return p + ts.front() * (q - p);
  };
  auto exit = [&](std::size_t i) -> std::optional<Complex> {
    const Complex p = path.points[i], q = path.points[i + 1];
    if (std::abs(q) <= radius) return q;
    auto ts = segment_circle_params(p, q, radius);
    if (ts.empty()) return std::nullopt;
    return p + ts.back() * (q - p);
  };
  for (std::size_t i = begin; i < end; ++i) {
    if (auto z = entry(i)) {
      rec.hit = true;
      rec.x_first = *z;
      break;
    }
  }
  if (!rec.hit) return rec;
  for (std::size_t i = end; i-- > begin;) {
    if (auto z = exit(i)) {
      rec.y_last = *z;
      break;
    }
  }
  return rec;
}

double trace_diameter(const PolyPath& path) {
  const std::vector<Complex>& pts = path.points;
  if (pts.size() < 2) return 0.0;
  // Extreme points in 16 directions give a lower bound; the exact maximum is
  // then taken over the points far enough out to matter.
  double best = 0.0;
  for (int k = 0; k < 16; ++k) {
    const Complex u = unit(kPi * k / 16.0);
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                        [u](Complex a, Complex b) { return dot(a, u) < dot(b, u); });
    best = std::max(best, std::abs(*hi - *lo));
  }
  Complex c{};
  for (Complex p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double rmax = 0.0;
  for (Complex p : pts) rmax = std::max(rmax, std::abs(p - c));
  std::vector<Complex> far;
  for (Complex p : pts) {
    if (std::abs(p - c) + rmax > best) far.push_back(p);
  }
  for (std::size_t i = 0; i < far.size(); ++i) {
    for (std::size_t j = i + 1; j < far.size(); ++j) best = std::max(best, std::abs(far[i] - far[j]));
  }
  return best;
}

}  // namespace exclab
