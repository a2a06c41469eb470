#include "glsig/grasp_change.hpp"

#include <cmath>

namespace glsig {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Stay:
      return "STAY";
    case Strategy::Grasp:
      return "GRASP";
    case Strategy::Move:
      return "MOVE";
    case Strategy::Release:
      return "RELEASE";
  }
  return "?";
}

bool is_valid_change(const GraspChange& change, const SimState& state) {
  const std::size_t n = state.grippers.size();
  if (change.strategies.size() != n || change.locations.size() != n) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool held = state.grippers[i].grasping;
    const Strategy s = change.strategies[i];
    if (s == Strategy::Grasp && held) return false;
    if ((s == Strategy::Move || s == Strategy::Release) && !held) return false;
    if ((s == Strategy::Grasp || s == Strategy::Move) &&
        !(change.locations[i] >= 0.0 && change.locations[i] <= 1.0)) {
      return false;
    }
  }
  return grasping_after(change, state) >= 1;
}

int grasping_after(const GraspChange& change, const SimState& state) {
  int count = 0;
  for (std::size_t i = 0; i < state.grippers.size(); ++i) {
    const Strategy s = change.strategies[i];
    if (s == Strategy::Grasp || s == Strategy::Move ||
        (s == Strategy::Stay && state.grippers[i].grasping)) {
      ++count;
    }
  }
  return count;
}

bool is_noop(const GraspChange& change) {
  for (Strategy s : change.strategies) {
    if (s != Strategy::Stay) return false;
  }
  return true;
}

PlannedChange plan_grasp_change(const RopeSimulator& sim, const SimState& state,
                                const GraspChange& change, int path_samples) {
  PlannedChange out;
  out.state = state;
  out.motion.assign(state.grippers.size(), {});
  if (!is_valid_change(change, state)) {
    out.reason = "invalid strategy tuple";
    return out;
  }
  const std::size_t n = state.grippers.size();
  try {
    bool released = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Strategy s = change.strategies[i];
      if (s == Strategy::Release || s == Strategy::Move) {
        out.state.grippers[i].grasping = false;
        released = true;
      }
    }
    if (released) out.state = sim.settle(out.state, sim.params().settle_steps);
    for (Strategy kind : {Strategy::Move, Strategy::Grasp}) {
      for (std::size_t i = 0; i < n; ++i) {
        if (change.strategies[i] != kind) continue;
        const Point3 from = out.state.grippers[i].position;
        const Point3 to = p_of_l(out.state.rope, change.locations[i]);
        if (!sim.in_workspace(to)) {
          out.reason = "grasp point out of reach of gripper " +
                       std::to_string(i);
          return out;
        }
        if (sim.gripper_collides(to)) {
          out.reason = "grasp point inside an obstacle";
          return out;
        }
        if (!sim.path_clear(from, to, path_samples)) {
          out.reason = "no collision-free path for gripper " +
                       std::to_string(i);
          return out;
        }
        out.motion[i] = {from, to};
        out.state = sim.try_grasp(out.state, i, change.locations[i], true);
      }
    }
  } catch (const Error& e) {
    out.reason = e.what();
    return out;
  }
  out.feasible = true;
  return out;
}

namespace {

SimState observed_settle(const RopeSimulator& sim, SimState s, int steps,
                         const StepObserver& on_step) {
  const Action zero = zero_action(s.grippers.size());
  for (int k = 0; k < steps; ++k) {
    s = sim.step(s, zero);
    if (on_step) on_step(s);
  }
  return s;
}

}  // namespace

SimState execute_grasp_change(const RopeSimulator& sim, const SimState& state,
                              const GraspChange& change,
                              const StepObserver& on_step) {
  if (!is_valid_change(change, state)) {
    throw OutOfRange("invalid grasp change");
  }
  if (is_noop(change)) return state;
  const auto& p = sim.params();
  const std::size_t n = state.grippers.size();
  SimState s = state;
  bool released = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Strategy st = change.strategies[i];
    if (st == Strategy::Release || st == Strategy::Move) {
      s.grippers[i].grasping = false;
      released = true;
    }
  }
  if (released) s = observed_settle(sim, s, p.settle_steps, on_step);

  const double step_len = p.v_max * p.dt;
  for (Strategy kind : {Strategy::Move, Strategy::Grasp}) {
    for (std::size_t i = 0; i < n; ++i) {
      if (change.strategies[i] != kind) continue;
      const double l = change.locations[i];
      const double start_dist =
          (s.grippers[i].position - p_of_l(s.rope, l)).norm();
      const int budget =
          static_cast<int>(std::ceil(start_dist / step_len)) + 40;
      for (int k = 0; k < budget; ++k) {
        const Vec3 d = p_of_l(s.rope, l) - s.grippers[i].position;
        const double dist = d.norm();
        if (dist <= 0.5 * p.grasp_radius) break;
        const double speed = std::min(p.v_max, dist / p.dt);
        const Point3 next = s.grippers[i].position + d * (speed * p.dt / dist);
        if (sim.gripper_collides(next) || !sim.in_workspace(next)) {
          throw GraspChangeBlocked(
              "gripper " + std::to_string(i) + " blocked on its way to l=" +
                  std::to_string(l),
              s);
        }
        Action a = zero_action(n);
        a[i] = d * (speed / dist);
        s = sim.step(s, a);
        if (on_step) on_step(s);
      }
      try {
        s = sim.try_grasp(s, i, l, false);
      } catch (const OutOfReach& e) {
        throw GraspChangeBlocked(e.what(), s);
      }
      if (on_step) on_step(s);
    }
  }
  return s;
}

}  // namespace glsig
