#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glsig/grasp_change.hpp"
#include "glsig/grasp_graph.hpp"
#include "glsig/mppi.hpp"
#include "glsig/signature.hpp"

namespace glsig {

enum class PlannerMode { Full, Alternating };

const char* to_string(PlannerMode m);

/// Planner variants used for comparisons.
struct Ablation {
  enum class Kind { Full, NoSignature, AlwaysBlocklist, RolloutScored };
  Kind kind = Kind::Full;
  int h_extra = 0;  ///< RolloutScored only

  std::string to_string() const;
  /// Accepts full, no_signature, always_blocklist, rollout_scored:<H>.
  static Ablation parse(const std::string& text);
  friend bool operator==(const Ablation&, const Ablation&) = default;
};

/// Signatures the planner must not return to.
class Blocklist {
 public:
  void add(const GLSignature& sig);
  bool contains(const GLSignature& sig) const;
  const std::vector<GLSignature>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<GLSignature> entries_;
};

struct PlannerParams {
  int n_x = 50;
  double penalty = 100.0;
  double delta_s_cap = 50.0;
  int resample_attempts = 10;
  int path_samples = 32;
  PlannerMode mode = PlannerMode::Full;
};

struct CostTerms {
  double infeasible = 0.0;
  double blocklisted = 0.0;
  double goal_mismatch = 0.0;
  double geodesic = 0.0;
  double state_change = 0.0;
  double rollout = 0.0;
  double total() const {
    return infeasible + blocklisted + goal_mismatch + geodesic + state_change +
           rollout;
  }
};

struct GraspCandidate {
  GraspChange change;
  bool feasible = false;
  std::string reason;
  SimState result_state;
  std::vector<std::vector<Point3>> motion_plan;
  std::optional<GLSignature> signature;  ///< of result_state, when computable
  double delta_s = 0.0;                  ///< uncapped
  CostTerms terms;
  double cost = 0.0;
};

/// One planning call.
struct PlanRequest {
  double l_k = 1.0;
  const Blocklist* blocklist = nullptr;
  std::optional<GLSignature> goal_sig;
  PlannerMode mode = PlannerMode::Full;
  std::uint64_t seed = 0;
  Ablation ablation;
  /// RolloutScored: final goal cost after extra MPC steps from a state.
  std::function<double(const SimState&)> rollout_score;
};

std::vector<GraspChange> sample_candidates(const SimState& state, int n_x,
                                           std::uint64_t seed, PlannerMode mode,
                                           const PlannerParams& params = {});

/// Norm of the stacked rope-point and gripper displacements.
double state_change(const SimState& a, const SimState& b);

/// Checks the straight-line paths of `change` and, when they are clear,
/// executes it step by step; result_state is what execution will produce.
GraspCandidate simulate_candidate(const RopeSimulator& sim,
                                  const SimState& state,
                                  const GraspChange& change,
                                  const PlannerParams& params = {});

/// Fills cand.signature, cand.terms and cand.cost. Candidates whose signature
/// cannot be computed are treated as infeasible.
void score_candidate(GraspCandidate& cand, const RopeSimulator& sim,
                     const PlanRequest& req, const CostWeights& w,
                     const PlannerParams& params = {});

/// Smallest |l - l_k| over grasping grippers in `state`; +inf when none.
double min_geodesic(const SimState& state, double l_k);

/// All scored candidates of one call plus the winner's index.
struct PlanResult {
  std::vector<GraspCandidate> candidates;
  std::size_t best = 0;
  const GraspCandidate& chosen() const { return candidates[best]; }
};

PlanResult plan_grasp(const RopeSimulator& sim, const SimState& state,
                      const PlanRequest& req, const CostWeights& w,
                      const PlannerParams& params = {});

/// True when the planned grasps get no closer to l_k than the current ones.
bool blocklist_decision(const SimState& state, const GraspCandidate& best,
                        double l_k);

}  // namespace glsig
