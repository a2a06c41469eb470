#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glsig/grasp_planner.hpp"
#include "glsig/mppi.hpp"
#include "glsig/rope_sim.hpp"
#include "glsig/signature.hpp"

namespace glsig {

struct PointGoal {
  Point3 goal_p = Point3::Zero();
  double goal_d = 0.05;
  double l_k = 1.0;
};

struct Subgoal {
  std::string loop;    ///< skeleton loop name
  int direction = 1;   ///< +1 along the loop's own field at its centre
  GLSignature signature;
};

struct ThreadingPlan {
  std::vector<Subgoal> subgoals;
  PointGoal final;
};

struct TaskParams {
  MppiParams mppi;
  CostWeights weights;
  PlannerParams planner;
  Ablation ablation;
  int i_max = 1000;
  int trap_window = 20;
  double trap_theta = 0.25;
  double w_mag = 1.0;
  /// Threading: the subgoal point sits this far past the fixture centre.
  double subgoal_offset = 0.08;
  /// Threading: keypoint for trap replanning is the grasp location minus this.
  double trap_backoff = 0.05;
};

struct TrialEvent {
  int iteration = 0;
  std::string kind;  ///< trap, blocklist, regrasp, no_regrasp, penetration,
                     ///< rejected, deviation, subgoal, blocked
  std::string detail;
  std::string signature;  ///< signature after the event, canonical text
  double geodesic = 0.0;  ///< min |l - l_k| over grasps after the event
};

struct TrialResult {
  bool success = false;
  int iterations = 0;
  int regrasps = 0;
  std::vector<std::pair<int, GLSignature>> signature_history;
  double wall_time = 0.0;  ///< s
  double sim_time = 0.0;   ///< simulated seconds of executed motion
  std::uint64_t seed = 0;
  std::vector<TrialEvent> events;
  /// Min geodesic distance to l_k right after each executed regrasp.
  std::vector<double> regrasp_geodesics;
  std::vector<GLSignature> blocklist;
  /// Trap replans that go ahead with a candidate ending in a blocklisted
  /// signature, keeping the current grasps included. With signatures enabled
  /// such candidates are refused unless they keep the current grasps or the
  /// current signature.
  int reattempts = 0;
  /// Threading: disc penetrations counted per subgoal.
  std::vector<int> penetrations;
  double max_strain = 0.0;
  double max_residual = 0.0;
  double final_distance = 0.0;  ///< keypoint to goal at the end
};

/// Point reaching with trap detection, grasp planning and blocklisting.
TrialResult point_reaching(const RopeSimulator& sim, const SimState& start,
                           const PointGoal& goal, const TaskParams& params,
                           std::uint64_t seed);

/// Threading through the fixtures of `plan` in order, then point reaching to
/// plan.final.
TrialResult threading(const RopeSimulator& sim, const SimState& start,
                      const ThreadingPlan& plan, const TaskParams& params,
                      std::uint64_t seed);

/// Unit field direction alignment term: w_mag * (1 - s * direction * F.d),
/// where F is the loop field at the keypoint before the move, d the unit
/// keypoint displacement and s = min(1, |F| / f_ref) fades the term away from
/// the fixture. Zero displacement gives w_mag.
double magnetic_cost(const RopeState& prev, const RopeState& next,
                     const PolyLoop& loop, int direction, double l_k,
                     double f_ref, double w_mag = 1.0);

/// Best-fit plane of a loop, normal oriented along the loop's area vector.
struct LoopPlane {
  Point3 center;
  Vec3 normal;
  Vec3 u;
  Vec3 v;
  double residual;  ///< max distance of a loop point from the plane
  double diameter;
};

/// Throws NonPlanarLoop when the residual exceeds 10% of the diameter.
LoopPlane fit_loop_plane(const PolyLoop& loop);

/// True when the keypoint's move from prev to next crosses the disc spanned
/// by the loop, in `direction` (+1 along the plane normal).
bool disc_penetration(const RopeState& prev, const RopeState& next,
                      const PolyLoop& loop, int direction, double l_k);

}  // namespace glsig
