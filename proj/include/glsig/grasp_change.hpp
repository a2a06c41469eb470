#pragma once

#include <functional>
#include <string>
#include <vector>

#include "glsig/errors.hpp"
#include "glsig/rope_sim.hpp"

namespace glsig {

enum class Strategy { Stay, Grasp, Move, Release };

const char* to_string(Strategy s);

/// Per-gripper strategies plus target locations (used by GRASP and MOVE).
struct GraspChange {
  std::vector<Strategy> strategies;
  std::vector<double> locations;
};

/// GRASP only for free grippers, MOVE/RELEASE only for grasping ones, sizes
/// match, locations in [0,1], and at least one gripper grasps afterwards.
bool is_valid_change(const GraspChange& change, const SimState& state);

/// Number of grippers grasping once `change` is applied.
int grasping_after(const GraspChange& change, const SimState& state);

bool is_noop(const GraspChange& change);

/// Outcome of applying a change with teleporting grippers (planning).
struct PlannedChange {
  bool feasible = false;
  std::string reason;  ///< why it is infeasible
  SimState state;
  /// Straight gripper path per gripper; empty when the gripper does not move.
  std::vector<std::vector<Point3>> motion;
};

/// Applies `change` on a copy of `state`: releases (and settles), then every
/// MOVE as release + straight move + grasp, then every GRASP. Grippers jump
/// to their targets after the path has been checked with `path_samples`
/// samples. Never throws for infeasible changes.
PlannedChange plan_grasp_change(const RopeSimulator& sim, const SimState& state,
                                const GraspChange& change,
                                int path_samples = 32);

/// Raised by execute_grasp_change; carries the state reached at the blockage.
class GraspChangeBlocked : public PathBlocked {
 public:
  GraspChangeBlocked(const std::string& what, SimState at)
      : PathBlocked(what), state(std::move(at)) {}
  SimState state;
};

using StepObserver = std::function<void(const SimState&)>;

/// Same order as plan_grasp_change, but grippers travel at v_max through the
/// simulator so the rope reacts. `on_step` sees every simulated state.
/// Throws GraspChangeBlocked when a gripper would enter an obstacle or cannot
/// get within grasp range.
SimState execute_grasp_change(const RopeSimulator& sim, const SimState& state,
                              const GraspChange& change,
                              const StepObserver& on_step = {});

}  // namespace glsig
