#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <span>
#include <string>
#include <vector>

namespace glsig {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;

/// Open polygonal curve with at least two distinct consecutive points.
class PolyLine {
 public:
  PolyLine() = default;
  explicit PolyLine(std::vector<Point3> points);

  const std::vector<Point3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point3& front() const { return points_.front(); }
  const Point3& back() const { return points_.back(); }
  double length() const;
  PolyLine reversed() const;

 private:
  std::vector<Point3> points_;
};

/// Closed polygonal curve. The closing segment (last -> first) is implicit;
/// the first point is never repeated at the end.
class PolyLoop {
 public:
  PolyLoop() = default;
  explicit PolyLoop(std::vector<Point3> points);

  const std::vector<Point3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  /// Number of segments, equal to the number of points.
  std::size_t segment_count() const { return points_.size(); }
  const Point3& segment_start(std::size_t i) const { return points_[i]; }
  const Point3& segment_end(std::size_t i) const {
    return points_[(i + 1) % points_.size()];
  }
  double length() const;
  PolyLoop reversed() const;
  /// Inserts the midpoint of segment `i` after point `i`.
  PolyLoop subdivided(std::size_t i) const;

 private:
  std::vector<Point3> points_;
};

/// A named obstacle loop. `wire_radius` > 0 additionally makes the loop a
/// physical obstacle (a chain of capsules) in the simulator.
struct NamedLoop {
  std::string name;
  PolyLoop loop;
  double wire_radius = 0.0;
};

/// Ordered, uniquely named set of obstacle loops.
class Skeleton {
 public:
  Skeleton() = default;
  explicit Skeleton(std::vector<NamedLoop> loops);

  const std::vector<NamedLoop>& loops() const { return loops_; }
  std::size_t size() const { return loops_.size(); }
  bool empty() const { return loops_.empty(); }
  const NamedLoop* find(const std::string& name) const;
  std::ptrdiff_t index_of(const std::string& name) const;

 private:
  std::vector<NamedLoop> loops_;
};

bool is_finite(const Vec3& v);

/// Squared distance between segments [p0,p1] and [q0,q1]; optionally returns
/// the closest-point parameters s (on p) and t (on q), both in [0,1].
double segment_segment_dist2(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                             const Vec3& q1, double* s = nullptr,
                             double* t = nullptr);

/// Distance from point `x` to segment [a,b]; `t` receives the parameter.
double point_segment_dist(const Vec3& x, const Vec3& a, const Vec3& b,
                          double* t = nullptr);

/// Circle of `n` points with the given center, unit normal and radius.
PolyLoop make_circle(const Vec3& center, const Vec3& normal, double radius,
                     std::size_t n);

}  // namespace glsig
