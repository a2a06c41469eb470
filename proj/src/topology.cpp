#include "glsig/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "glsig/errors.hpp"

namespace glsig {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
    0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
    0.1012285362903763};

constexpr std::size_t kMaxPanels = 4096;

double segment_to_loop_dist(const Point3& a, const Point3& b,
                            const PolyLoop& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.segment_count(); ++j) {
    best = std::min(best, segment_segment_dist2(a, b, s.segment_start(j),
                                                s.segment_end(j)));
  }
  return std::sqrt(best);
}

}  // namespace

Vec3 segment_field(const Point3& seg_start, const Point3& seg_end,
                   const Point3& r) {
  const Vec3 seg = seg_end - seg_start;
  const double seg2 = seg.squaredNorm();
  if (seg2 == 0.0) {
    throw DegenerateGeometry("segment_field: zero-length segment");
  }
  const Vec3 p = seg_start - r;
  const Vec3 pp = seg_end - r;
  const Vec3 d = seg.cross(p.cross(pp)) / seg2;
  const double d2 = d.squaredNorm();
  if (d2 < kGeomEps * kGeomEps) {
    throw DegenerateGeometry(
        "segment_field: query point lies on the segment's line");
  }
  return (d.cross(pp) / pp.norm() - d.cross(p) / p.norm()) / d2;
}

Vec3 loop_field(const PolyLoop& loop, const Point3& r) {
  Vec3 f = Vec3::Zero();
  for (std::size_t j = 0; j < loop.segment_count(); ++j) {
    f += segment_field(loop.segment_start(j), loop.segment_end(j), r);
  }
  return f;
}

double linking_integral(const PolyLoop& tau, const PolyLoop& s) {
  double total = 0.0;
  for (std::size_t k = 0; k < tau.segment_count(); ++k) {
    const Point3& r0 = tau.segment_start(k);
    const Point3& r1 = tau.segment_end(k);
    const Vec3 delta = r1 - r0;
    const double len = delta.norm();
    const double clearance = segment_to_loop_dist(r0, r1, s);
    if (clearance < kGeomEps) {
      std::ostringstream msg;
      msg << "loops touch (clearance " << clearance << ") at tau segment "
          << k;
      throw DegenerateGeometry(msg.str());
    }
    const std::size_t panels = std::min<std::size_t>(
        kMaxPanels,
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(len / clearance))));
    const Vec3 dr = delta / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const Point3 mid = r0 + (static_cast<double>(p) + 0.5) * dr;
      double panel = 0.0;
      for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
        const Vec3 off = 0.5 * kGlNodes[q] * dr;
        panel += kGlWeights[q] * (loop_field(s, mid + off).dot(dr) +
                                  loop_field(s, mid - off).dot(dr));
      }
      total += 0.5 * panel;
    }
  }
  return total / (4.0 * std::numbers::pi);
}

double h_raw(const PolyLoop& tau, const PolyLoop& s) {
  return std::abs(linking_integral(tau, s));
}

int h_int(const PolyLoop& tau, const PolyLoop& s) {
  const double raw = h_raw(tau, s);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > kRoundEps) {
    std::ostringstream msg;
    msg << "linking integral " << raw << " is not near an integer";
    throw NonIntegralSignature(msg.str());
  }
  return static_cast<int>(rounded);
}

std::vector<int> h_vector(const PolyLoop& tau, const Skeleton& skel) {
  std::vector<int> out;
  out.reserve(skel.size());
  for (const auto& named : skel.loops()) {
    try {
      out.push_back(h_int(tau, named.loop));
    } catch (const DegenerateGeometry& e) {
      throw DegenerateGeometry(std::string(e.what()) + " [skeleton loop '" +
                               named.name + "']");
    } catch (const NonIntegralSignature& e) {
      throw NonIntegralSignature(std::string(e.what()) + " [skeleton loop '" +
                                 named.name + "']");
    }
  }
  return out;
}

double loop_clearance(const PolyLoop& a, const PolyLoop& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.segment_count(); ++i) {
    best = std::min(best,
                    segment_to_loop_dist(a.segment_start(i), a.segment_end(i),
                                         b));
  }
  return best;
}

}  // namespace glsig
