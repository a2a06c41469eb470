#include "glsig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "glsig/errors.hpp"

namespace glsig {

namespace {

void check_points(const std::vector<Point3>& pts, bool closed,
                  const char* what) {
  for (const auto& p : pts) {
    if (!is_finite(p)) {
      throw InvalidGeometry(std::string(what) + ": non-finite coordinate");
    }
  }
  const std::size_t n = pts.size();
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    if ((pts[(i + 1) % n] - pts[i]).squaredNorm() == 0.0) {
      throw InvalidGeometry(std::string(what) + ": zero-length segment at " +
                            std::to_string(i));
    }
  }
}

}  // namespace

bool is_finite(const Vec3& v) { return v.allFinite(); }

PolyLine::PolyLine(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InvalidGeometry("PolyLine needs at least 2 points");
  }
  check_points(points_, false, "PolyLine");
}

double PolyLine::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    len += (points_[i + 1] - points_[i]).norm();
  }
  return len;
}

PolyLine PolyLine::reversed() const {
  std::vector<Point3> pts(points_.rbegin(), points_.rend());
  return PolyLine(std::move(pts));
}

PolyLoop::PolyLoop(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() < 3) {
    throw InvalidGeometry("PolyLoop needs at least 3 points");
  }
  check_points(points_, true, "PolyLoop");
}

double PolyLoop::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    len += (segment_end(i) - segment_start(i)).norm();
  }
  return len;
}

PolyLoop PolyLoop::reversed() const {
  std::vector<Point3> pts(points_.rbegin(), points_.rend());
  return PolyLoop(std::move(pts));
}

PolyLoop PolyLoop::subdivided(std::size_t i) const {
  std::vector<Point3> pts = points_;
  const Point3 mid = 0.5 * (segment_start(i) + segment_end(i));
  pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
  return PolyLoop(std::move(pts));
}

Skeleton::Skeleton(std::vector<NamedLoop> loops) : loops_(std::move(loops)) {
  std::unordered_set<std::string> seen;
  for (const auto& l : loops_) {
    if (!seen.insert(l.name).second) {
      throw InvalidGeometry("duplicate skeleton loop name '" + l.name + "'");
    }
  }
}

const NamedLoop* Skeleton::find(const std::string& name) const {
  for (const auto& l : loops_) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::ptrdiff_t Skeleton::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < loops_.size(); ++i) {
    if (loops_[i].name == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

// Closest points between two segments (Ericson, Real-Time Collision Detection
// 5.1.9).
double segment_segment_dist2(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                             const Vec3& q1, double* s_out, double* t_out) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kEps = 1e-300;
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    s = t = 0.0;
  } else if (a <= kEps) {
    s = 0.0;
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      t = 0.0;
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  if (s_out) *s_out = s;
  if (t_out) *t_out = t;
  return ((p0 + s * d1) - (q0 + t * d2)).squaredNorm();
}

double point_segment_dist(const Vec3& x, const Vec3& a, const Vec3& b,
                          double* t_out) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return (a + t * ab - x).norm();
}

PolyLoop make_circle(const Vec3& center, const Vec3& normal, double radius,
                     std::size_t n) {
  const Vec3 nz = normal.normalized();
  const Vec3 helper =
      std::abs(nz.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = (helper - helper.dot(nz) * nz).normalized();
  const Vec3 v = nz.cross(u);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(n);
    pts.push_back(center + radius * (std::cos(a) * u + std::sin(a) * v));
  }
  return PolyLoop(std::move(pts));
}

}  // namespace glsig
