#pragma once

#include <vector>

#include "glsig/geometry.hpp"

namespace glsig {

/// Distance below which a query point counts as lying on a segment's line.
inline constexpr double kGeomEps = 1e-9;
/// Largest tolerated distance between a linking integral and its integer.
inline constexpr double kRoundEps = 0.05;

/// Field of one straight segment at `r` (the Biot-Savart kernel integrated
/// in closed form over the segment). Throws DegenerateGeometry when `r` lies
/// within kGeomEps of the segment's supporting line.
Vec3 segment_field(const Point3& seg_start, const Point3& seg_end,
                   const Point3& r);

/// Sum of segment_field over every segment of `loop`.
Vec3 loop_field(const PolyLoop& loop, const Point3& r);

/// Signed Gauss linking integral of `tau` around `s`, i.e. the line integral
/// over tau of loop_field(s, .) divided by 4*pi.
///
/// Each tau segment is split into panels no longer than the segment's
/// clearance to `s`, and every panel is integrated with 8-point
/// Gauss-Legendre. Long segments passing close to `s` (straight arm paths)
/// therefore stay accurate without densifying the loop itself.
double linking_integral(const PolyLoop& tau, const PolyLoop& s);

/// Non-negative linking value |linking_integral|.
double h_raw(const PolyLoop& tau, const PolyLoop& s);

/// h_raw rounded to the nearest integer. Throws NonIntegralSignature when the
/// integral is further than kRoundEps from an integer.
int h_int(const PolyLoop& tau, const PolyLoop& s);

/// [h(tau, S_1), ..., h(tau, S_n)] in skeleton order. Errors are rethrown with
/// the offending loop name attached.
std::vector<int> h_vector(const PolyLoop& tau, const Skeleton& skel);

/// Smallest distance between any segment of `a` and any segment of `b`.
double loop_clearance(const PolyLoop& a, const PolyLoop& b);

}  // namespace glsig
