#include "glsig/rope_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glsig/errors.hpp"

namespace glsig {

struct RopeSimulator::Primitive {
  Obstacle shape;
  Vec3 lo;  // inflated bounds for broad-phase rejection
  Vec3 hi;
};

// Equality constraint pinning material location `s` (fractional node index)
// to `target`. Nodes i0 (and i1 when the location falls inside a segment) are
// moved rigidly, so the pinned segment keeps its length.
struct RopeSimulator::Pin {
  double s = 0.0;
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  double t = 0.0;
  bool single = true;
  Point3 target = Point3::Zero();
};

namespace {

constexpr double kLocTol = 1e-12;

Point3 closest_on_box(const Box& b, const Point3& x) {
  return x.cwiseMax(b.lo).cwiseMin(b.hi);
}

// Pushes `x` out of box `b` inflated by `r`. Returns true when moved.
bool push_out_of_box(const Box& b, double r, Point3& x) {
  const Point3 c = closest_on_box(b, x);
  const Vec3 diff = x - c;
  const double dist = diff.norm();
  if (dist > 0.0) {
    if (dist >= r) return false;
    x = c + diff * (r / dist);
    return true;
  }
  // Inside: leave through the nearest face.
  double best = std::numeric_limits<double>::infinity();
  int axis = 0;
  double sign = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double to_lo = x[k] - b.lo[k];
    const double to_hi = b.hi[k] - x[k];
    if (to_lo < best) {
      best = to_lo;
      axis = k;
      sign = -1.0;
    }
    if (to_hi < best) {
      best = to_hi;
      axis = k;
      sign = 1.0;
    }
  }
  x[axis] = sign > 0 ? b.hi[axis] + r : b.lo[axis] - r;
  return true;
}

double box_distance(const Box& b, const Point3& x) {
  const Point3 c = closest_on_box(b, x);
  return (x - c).norm();  // zero inside
}

bool push_out_of_capsule(const Capsule& cap, double r, Point3& x) {
  double t = 0.0;
  const double dist = point_segment_dist(x, cap.a, cap.b, &t);
  const double lim = cap.radius + r;
  if (dist >= lim) return false;
  const Point3 c = cap.a + t * (cap.b - cap.a);
  Vec3 n = x - c;
  if (n.squaredNorm() < 1e-24) {
    const Vec3 axis = cap.b - cap.a;
    n = axis.cross(Vec3::UnitZ());
    if (n.squaredNorm() < 1e-24) n = axis.cross(Vec3::UnitX());
  }
  x = c + n.normalized() * lim;
  return true;
}

bool aabb_overlap(const Vec3& alo, const Vec3& ahi, const Vec3& blo,
                  const Vec3& bhi) {
  return (alo.array() <= bhi.array()).all() &&
         (blo.array() <= ahi.array()).all();
}

}  // namespace

Action zero_action(std::size_t grippers) {
  return Action(grippers, Vec3::Zero());
}

Point3 p_of_l(const RopeState& rope, double l) {
  if (!(l >= -kLocTol && l <= 1.0 + kLocTol)) {
    std::ostringstream msg;
    msg << "rope location " << l << " outside [0,1]";
    throw OutOfRange(msg.str());
  }
  const std::size_t n = rope.points.size();
  if (n < 2) throw OutOfRange("rope has fewer than 2 points");
  const double s = std::clamp(l, 0.0, 1.0) * static_cast<double>(n - 1);
  const std::size_t i =
      std::min(static_cast<std::size_t>(std::floor(s)), n - 2);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * rope.points[i] + t * rope.points[i + 1];
}

double max_strain(const RopeState& rope) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < rope.points.size(); ++i) {
    const double len = (rope.points[i + 1] - rope.points[i]).norm();
    worst = std::max(worst, std::abs(len / rope.rest_len - 1.0));
  }
  return worst;
}

double constraint_residual(const SimState& state, const WorldConfig& world) {
  double worst = 0.0;
  for (const auto& g : state.grippers) {
    if (g.grasping) {
      worst = std::max(worst, (g.position - p_of_l(state.rope, g.grasp_loc))
                                  .norm());
    }
  }
  if (world.attach) {
    worst = std::max(worst, (world.attach->point -
                             p_of_l(state.rope, world.attach->loc))
                                .norm());
  }
  return worst;
}

Eigen::VectorXd robot_configuration(const SimState& state) {
  Eigen::VectorXd q(3 * static_cast<Eigen::Index>(state.grippers.size()));
  for (std::size_t i = 0; i < state.grippers.size(); ++i) {
    q.segment<3>(3 * static_cast<Eigen::Index>(i)) = state.grippers[i].position;
  }
  return q;
}

RopeSimulator::RopeSimulator(WorldConfig world, SimParams params)
    : world_(std::make_shared<const WorldConfig>(std::move(world))),
      params_(params) {
  auto prims = std::make_shared<std::vector<Primitive>>();
  const double margin = params_.gripper_radius + params_.rope_radius +
                        params_.contact_tolerance + 1e-6;
  auto add_capsule = [&](const Capsule& c) {
    Primitive p{c, c.a.cwiseMin(c.b), c.a.cwiseMax(c.b)};
    p.lo.array() -= c.radius + margin;
    p.hi.array() += c.radius + margin;
    prims->push_back(p);
  };
  for (const auto& ob : world_->obstacles) {
    if (const auto* b = std::get_if<Box>(&ob)) {
      Primitive p{*b, b->lo, b->hi};
      p.lo.array() -= margin;
      p.hi.array() += margin;
      prims->push_back(p);
    } else {
      add_capsule(std::get<Capsule>(ob));
    }
  }
  for (const auto& named : world_->skeleton.loops()) {
    if (named.wire_radius <= 0.0) continue;
    const auto& loop = named.loop;
    for (std::size_t i = 0; i < loop.segment_count(); ++i) {
      add_capsule(
          Capsule{loop.segment_start(i), loop.segment_end(i), named.wire_radius});
    }
  }
  primitives_ = std::move(prims);
}

double RopeSimulator::min_grasp_gap(const RopeState& rope) const {
  return static_cast<double>(params_.min_grasp_gap_segments) /
         static_cast<double>(rope.points.size() - 1);
}

std::vector<RopeSimulator::Pin> RopeSimulator::make_pins(
    const SimState& state) const {
  const std::size_t n = state.rope.points.size();
  std::vector<Pin> pins;
  auto add = [&](double loc, const Point3& target) {
    Pin p;
    p.s = std::clamp(loc, 0.0, 1.0) * static_cast<double>(n - 1);
    p.i0 = std::min(static_cast<std::size_t>(std::floor(p.s)), n - 2);
    p.t = p.s - static_cast<double>(p.i0);
    p.i1 = p.i0 + 1;
    p.target = target;
    if (p.t < 1e-9) {
      p.single = true;
    } else if (p.t > 1.0 - 1e-9) {
      p.single = true;
      p.i0 = p.i1;
      p.t = 0.0;
    } else {
      p.single = false;
    }
    pins.push_back(p);
  };
  if (world_->attach) add(world_->attach->loc, world_->attach->point);
  for (const auto& g : state.grippers) {
    if (g.grasping) add(g.grasp_loc, g.position);
  }
  return pins;
}

void RopeSimulator::collide_rope(std::vector<Point3>& x,
                                 const std::vector<double>& w,
                                 const RopeState& rope) const {
  (void)rope;
  const double rr = params_.rope_radius;
  const std::size_t n = x.size();
  if (world_->floor_z) {
    const double fz = *world_->floor_z + rr;
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] > 0.0 && x[j].z() < fz) x[j].z() = fz;
    }
  }
  for (const auto& prim : *primitives_) {
    if (const auto* box = std::get_if<Box>(&prim.shape)) {
      for (std::size_t j = 0; j < n; ++j) {
        if (w[j] == 0.0) continue;
        if (((x[j].array() < prim.lo.array()) ||
             (x[j].array() > prim.hi.array()))
                .any()) {
          continue;
        }
        push_out_of_box(*box, rr, x[j]);
      }
      continue;
    }
    const auto& cap = std::get<Capsule>(prim.shape);
    const double lim = cap.radius + rr;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const Vec3 slo = x[j].cwiseMin(x[j + 1]);
      const Vec3 shi = x[j].cwiseMax(x[j + 1]);
      if (!aabb_overlap(slo, shi, prim.lo, prim.hi)) continue;
      double s = 0.0;
      double t = 0.0;
      const double d2 =
          segment_segment_dist2(x[j], x[j + 1], cap.a, cap.b, &s, &t);
      if (d2 >= lim * lim) continue;
      const double wa = w[j] * (1.0 - s);
      const double wb = w[j + 1] * s;
      const double denom = wa * (1.0 - s) + wb * s;
      if (denom <= 1e-12) continue;
      const Point3 on_rope = x[j] + s * (x[j + 1] - x[j]);
      const Point3 on_cap = cap.a + t * (cap.b - cap.a);
      Vec3 nrm = on_rope - on_cap;
      double dist = std::sqrt(d2);
      if (dist < 1e-12) {
        nrm = (cap.b - cap.a).cross(x[j + 1] - x[j]);
        if (nrm.squaredNorm() < 1e-24) nrm = Vec3::UnitZ();
        dist = 0.0;
      }
      nrm.normalize();
      const double lambda = (lim - dist) / denom;
      x[j] += wa * lambda * nrm;
      x[j + 1] += wb * lambda * nrm;
    }
  }
}

void RopeSimulator::relax(RopeState& rope, const std::vector<Pin>& pins,
                          double dt) const {
  auto& x = rope.points;
  const std::size_t n = x.size();
  const double rest = rope.rest_len;
  std::vector<double> w(n, 1.0);
  // A grasp between two nodes leaves both free so the segment can turn
  // about the grasp point; project_pins enforces the point constraint.
  for (const auto& p : pins) {
    if (p.single) w[p.i0] = 0.0;
  }
  Vec3 drift = world_->gravity * dt * dt;
  if (drift.norm() > params_.max_drift) {
    drift *= params_.max_drift / drift.norm();
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] > 0.0) x[j] += drift;
  }

  auto project_pins = [&] {
    for (const auto& p : pins) {
      const Point3 cur =
          p.single ? x[p.i0] : (1.0 - p.t) * x[p.i0] + p.t * x[p.i1];
      const Vec3 c = p.target - cur;
      if (p.single) {
        x[p.i0] += c;
      } else {
        const double k = 1.0 / ((1.0 - p.t) * (1.0 - p.t) + p.t * p.t);
        x[p.i0] += (1.0 - p.t) * k * c;
        x[p.i1] += p.t * k * c;
      }
    }
  };
  project_pins();

  // One Newton step on all segment-length constraints at once. The
  // constraint Jacobian of a chain gives a tridiagonal system in the
  // multipliers, solved with the Thomas algorithm.
  const std::size_t m = n - 1;
  std::vector<Vec3> dir(m);
  std::vector<double> diag(m), off(m), rhs(m), lambda(m);
  auto length_error = [&] {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (w[j] + w[j + 1] == 0.0) continue;
      const double c = (x[j + 1] - x[j]).norm() - rest;
      sum += c * c;
    }
    return sum;
  };
  auto solve_lengths = [&] {
    for (std::size_t j = 0; j < m; ++j) {
      const Vec3 d = x[j + 1] - x[j];
      const double len = d.norm();
      const double wsum = w[j] + w[j + 1];
      if (wsum == 0.0 || len < 1e-12) {
        dir[j] = Vec3::Zero();
        diag[j] = 1.0;
        rhs[j] = 0.0;
      } else {
        dir[j] = d / len;
        diag[j] = wsum;
        rhs[j] = len - rest;
      }
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
      off[j] = -w[j + 1] * dir[j].dot(dir[j + 1]);
    }
    // Forward elimination, then back substitution.
    for (std::size_t j = 1; j < m; ++j) {
      const double f = off[j - 1] / diag[j - 1];
      diag[j] -= f * off[j - 1];
      rhs[j] -= f * rhs[j - 1];
    }
    lambda[m - 1] = rhs[m - 1] / diag[m - 1];
    for (std::size_t j = m - 1; j-- > 0;) {
      lambda[j] = (rhs[j] - off[j] * lambda[j + 1]) / diag[j];
    }
    // Backtracking keeps the step from overshooting on nearly taut chains,
    // where the linearisation is poor.
    const std::vector<Point3> start = x;
    const double before = length_error();
    double scale = 1.0;
    for (int tries = 0; tries < 6; ++tries, scale *= 0.5) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(lambda[j])) return;
        const Vec3 c = scale * lambda[j] * dir[j];
        x[j] += w[j] * c;
        x[j + 1] -= w[j + 1] * c;
      }
      if (length_error() < before) return;
      x = start;
    }
  };

  // Gauss-Seidel distance projection, direction alternating per sweep.
  auto sweep = [&](bool forward) {
    auto one = [&](std::size_t j) {
      const double wsum = w[j] + w[j + 1];
      if (wsum == 0.0) return;
      const Vec3 d = x[j + 1] - x[j];
      const double len = d.norm();
      if (len < 1e-12) return;
      const Vec3 corr = d * ((len - rest) / (len * wsum));
      x[j] += w[j] * corr;
      x[j + 1] -= w[j + 1] * corr;
    };
    if (forward) {
      for (std::size_t j = 0; j + 1 < n; ++j) one(j);
    } else {
      for (std::size_t j = n - 1; j-- > 0;) one(j);
    }
  };

  for (int it = 0; it < params_.iterations; ++it) {
    sweep(it % 2 == 0);
    // Long-range attachments: no node can be further from a pin than the
    // rest length of rope between them.
    for (const auto& p : pins) {
      for (std::size_t j = 0; j < n; ++j) {
        if (w[j] == 0.0) continue;
        const double maxd = std::abs(static_cast<double>(j) - p.s) * rest;
        const Vec3 d = x[j] - p.target;
        const double dist = d.norm();
        if (dist > maxd) x[j] = p.target + d * (maxd / dist);
      }
    }
    collide_rope(x, w, rope);
    project_pins();
  }
  // Sweeps alone leave the chain stretched under load; Newton steps remove
  // the remaining strain without changing the motion the sweeps produced.
  for (int k = 0; k < params_.newton_iterations; ++k) {
    solve_lengths();
    collide_rope(x, w, rope);
    project_pins();
  }
}

Point3 RopeSimulator::push_gripper_out(const Point3& p) const {
  Point3 x = p;
  const double r = params_.gripper_radius;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& prim : *primitives_) {
      if (((x.array() < prim.lo.array()) || (x.array() > prim.hi.array()))
              .any()) {
        continue;
      }
      if (const auto* box = std::get_if<Box>(&prim.shape)) {
        push_out_of_box(*box, r, x);
      } else {
        push_out_of_capsule(std::get<Capsule>(prim.shape), r, x);
      }
    }
  }
  return x;
}

Point3 RopeSimulator::clamp_workspace(const Point3& p) const {
  Point3 x = p;
  const Vec3 d = x - world_->base;
  const double dist = d.norm();
  if (dist > world_->reach) x = world_->base + d * (world_->reach / dist);
  if (world_->floor_z) {
    x.z() = std::max(x.z(), *world_->floor_z + params_.rope_radius);
  }
  return x;
}

void RopeSimulator::apply_tethers(SimState& state) const {
  struct Anchor {
    double loc;
    int gripper;  // -1 for the attach point
  };
  std::vector<Anchor> anchors;
  if (world_->attach) anchors.push_back({world_->attach->loc, -1});
  for (std::size_t i = 0; i < state.grippers.size(); ++i) {
    if (state.grippers[i].grasping) {
      anchors.push_back({state.grippers[i].grasp_loc, static_cast<int>(i)});
    }
  }
  if (anchors.size() < 2) return;
  std::sort(anchors.begin(), anchors.end(),
            [](const Anchor& a, const Anchor& b) { return a.loc < b.loc; });
  const double full = state.rope.total_length();
  auto pos = [&](const Anchor& a) -> Point3 {
    if (a.gripper < 0) return world_->attach->point;
    return state.grippers[static_cast<std::size_t>(a.gripper)].position;
  };
  auto set = [&](const Anchor& a, const Point3& p) {
    state.grippers[static_cast<std::size_t>(a.gripper)].position = p;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
      const Anchor& a = anchors[k];
      const Anchor& b = anchors[k + 1];
      const double maxd = (b.loc - a.loc) * full;
      const Point3 pa = pos(a);
      const Point3 pb = pos(b);
      const Vec3 d = pb - pa;
      const double dist = d.norm();
      if (dist <= maxd || dist == 0.0) continue;
      const Vec3 dir = d / dist;
      const double excess = dist - maxd;
      if (a.gripper >= 0 && b.gripper >= 0) {
        set(a, pa + 0.5 * excess * dir);
        set(b, pb - 0.5 * excess * dir);
      } else if (a.gripper >= 0) {
        set(a, pa + excess * dir);
      } else if (b.gripper >= 0) {
        set(b, pb - excess * dir);
      }
    }
  }
}

SimState RopeSimulator::step(const SimState& state, const Action& action) const {
  return step(state, action, params_.dt);
}

SimState RopeSimulator::step(const SimState& state, const Action& action,
                             double dt) const {
  if (action.size() != state.grippers.size()) {
    throw OutOfRange("action size does not match gripper count");
  }
  for (const auto& v : action) {
    if (!v.allFinite() || v.norm() > params_.v_max * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg << "gripper speed " << v.norm() << " exceeds v_max "
          << params_.v_max;
      throw ExcessVelocity(msg.str());
    }
  }
  const double retry_strain = 0.8 * params_.max_strain;
  constexpr double kScales[] = {1.0, 0.5, 0.25, 0.0};
  SimState next;
  for (double scale : kScales) {
    next = state;
    for (std::size_t i = 0; i < next.grippers.size(); ++i) {
      auto& g = next.grippers[i];
      if (scale > 0.0) {
        g.position = clamp_workspace(
            push_gripper_out(g.position + scale * dt * action[i]));
      }
    }
    apply_tethers(next);
    relax(next.rope, make_pins(next), dt);
    if (max_strain(next.rope) <= retry_strain) break;
  }
  // A held rope wedged against obstacles can creep past the strain limit
  // even when the grippers stay put. Such a step is dropped when the input
  // already meets its constraints.
  const double e = max_strain(next.rope);
  const bool drop = e > params_.max_strain && e > max_strain(state.rope) &&
                    !make_pins(state).empty() &&
                    constraint_residual(state, *world_) < 1e-3;
  SimState best = drop ? state : std::move(next);
  best.contacts = count_contacts(best);
  return best;
}

SimState RopeSimulator::settle(const SimState& state, int steps) const {
  SimState s = state;
  const Action zero = zero_action(s.grippers.size());
  for (int i = 0; i < steps; ++i) s = step(s, zero);
  return s;
}

SimState RopeSimulator::try_grasp(const SimState& state, std::size_t gripper,
                                  double l, bool teleport) const {
  if (gripper >= state.grippers.size()) {
    throw OutOfRange("no gripper " + std::to_string(gripper));
  }
  if (state.grippers[gripper].grasping) {
    throw AlreadyGrasping("gripper " + std::to_string(gripper) +
                          " is already grasping");
  }
  if (!(l >= 0.0 && l <= 1.0)) {
    throw OutOfRange("grasp location outside [0,1]");
  }
  const double gap = min_grasp_gap(state.rope) - 1e-12;
  for (std::size_t i = 0; i < state.grippers.size(); ++i) {
    const auto& g = state.grippers[i];
    if (i != gripper && g.grasping && std::abs(g.grasp_loc - l) < gap) {
      throw RejectedOverlap("grasp at " + std::to_string(l) +
                            " overlaps gripper " + std::to_string(i));
    }
  }
  if (world_->attach && std::abs(world_->attach->loc - l) < gap) {
    throw RejectedOverlap("grasp at " + std::to_string(l) +
                          " overlaps the attach point");
  }
  SimState next = state;
  auto& g = next.grippers[gripper];
  const Point3 target = p_of_l(state.rope, l);
  if (teleport) {
    g.position = target;
  } else if ((g.position - target).norm() > params_.grasp_radius) {
    throw OutOfReach("rope point is " +
                     std::to_string((g.position - target).norm()) +
                     " m from gripper " + std::to_string(gripper));
  }
  g.grasping = true;
  g.grasp_loc = l;
  return settle(next, params_.grasp_settle_steps);
}

SimState RopeSimulator::release(const SimState& state,
                                std::size_t gripper) const {
  if (gripper >= state.grippers.size()) {
    throw OutOfRange("no gripper " + std::to_string(gripper));
  }
  if (!state.grippers[gripper].grasping) {
    throw NotGrasping("gripper " + std::to_string(gripper) +
                      " is not grasping");
  }
  SimState next = state;
  next.grippers[gripper].grasping = false;
  return settle(next, params_.settle_steps);
}

bool RopeSimulator::gripper_collides(const Point3& p) const {
  const double r = params_.gripper_radius;
  for (const auto& prim : *primitives_) {
    if (((p.array() < prim.lo.array()) || (p.array() > prim.hi.array()))
            .any()) {
      continue;
    }
    if (const auto* box = std::get_if<Box>(&prim.shape)) {
      if (box_distance(*box, p) < r - 1e-9) return true;
    } else {
      const auto& cap = std::get<Capsule>(prim.shape);
      if (point_segment_dist(p, cap.a, cap.b) < cap.radius + r - 1e-9) {
        return true;
      }
    }
  }
  return false;
}

bool RopeSimulator::in_workspace(const Point3& p) const {
  if ((p - world_->base).norm() > world_->reach + 1e-9) return false;
  if (world_->floor_z && p.z() < *world_->floor_z - 1e-9) return false;
  return true;
}

bool RopeSimulator::path_clear(const Point3& from, const Point3& to,
                               int samples) const {
  const int n = std::max(1, samples);
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const Point3 p = from + t * (to - from);
    if (!in_workspace(p) || gripper_collides(p)) return false;
  }
  return true;
}

int RopeSimulator::count_contacts(const SimState& state) const {
  const auto& x = state.rope.points;
  const std::size_t n = x.size();
  const double rr = params_.rope_radius + params_.contact_tolerance;
  std::vector<char> node_hit(n, 0);
  int segment_hits = 0;
  int gripper_hits = 0;
  for (const auto& prim : *primitives_) {
    if (const auto* box = std::get_if<Box>(&prim.shape)) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!node_hit[j] && box_distance(*box, x[j]) <= rr) node_hit[j] = 1;
      }
    } else {
      const auto& cap = std::get<Capsule>(prim.shape);
      const double lim = cap.radius + rr;
      for (std::size_t j = 0; j < n; ++j) {
        if (!node_hit[j] && point_segment_dist(x[j], cap.a, cap.b) <= lim) {
          node_hit[j] = 1;
        }
      }
    }
  }
  for (const auto& prim : *primitives_) {
    const auto* cap = std::get_if<Capsule>(&prim.shape);
    if (!cap) continue;
    const double lim = cap->radius + rr;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (node_hit[j] || node_hit[j + 1]) continue;
      if (segment_segment_dist2(x[j], x[j + 1], cap->a, cap->b) <= lim * lim) {
        ++segment_hits;
      }
    }
  }
  const double gr = params_.gripper_radius + params_.contact_tolerance;
  for (const auto& g : state.grippers) {
    for (const auto& prim : *primitives_) {
      bool hit = false;
      if (const auto* box = std::get_if<Box>(&prim.shape)) {
        hit = box_distance(*box, g.position) <= gr;
      } else {
        const auto& cap = std::get<Capsule>(prim.shape);
        hit = point_segment_dist(g.position, cap.a, cap.b) <= cap.radius + gr;
      }
      if (hit) {
        ++gripper_hits;
        break;
      }
    }
  }
  return static_cast<int>(std::count(node_hit.begin(), node_hit.end(), 1)) +
         segment_hits + gripper_hits;
}

}  // namespace glsig
