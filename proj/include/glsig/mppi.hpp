#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <vector>

#include "glsig/rope_sim.hpp"

namespace glsig {

struct MppiParams {
  int horizon = 15;
  int samples = 64;
  double noise_sigma = 0.05;  ///< m/s, per axis
  double temperature = 0.05;
  double dt = 0.05;
};

/// Throws ValidationError when H < 1, M < 2, lambda <= 0, sigma < 0 or
/// dt <= 0.
void validate(const MppiParams& p);

struct CostWeights {
  double alpha1 = 1.0;   ///< grasp-to-goal distance
  double alpha2 = 0.5;   ///< sqrt of the contact count
  double alpha3 = 0.05;  ///< robot speed
  double beta1 = 1.0;    ///< state change in grasp scoring
};

/// ||p(l_k) - goal|| + a1 * sum over grasps ||p(l_i) - goal||
///   + a2 * sqrt(n_con) + a3 * ||qdot||.
double goal_cost(const SimState& state, const Action& qdot, const Point3& goal_p,
                 double l_k, const CostWeights& w);

/// Per-step rollout cost: (state before, state after, action).
using StepCost =
    std::function<double(const SimState&, const SimState&, const Action&)>;

/// MPPI over gripper velocities. Only grippers that grasp at the time of the
/// call are actuated; free grippers get zero velocity.
class MppiController {
 public:
  MppiController(MppiParams params, std::size_t grippers, std::uint64_t seed);

  /// One control step: sample, roll out, reweight, return the first action
  /// of the updated nominal sequence and shift the sequence.
  Action step(const RopeSimulator& sim, const SimState& state,
              const StepCost& cost);

  /// Zeroes the nominal sequence.
  void reset();

  const MppiParams& params() const { return params_; }
  const std::vector<Action>& nominal() const { return nominal_; }
  /// Softmin weights of the last step's samples.
  const std::vector<double>& last_weights() const { return weights_; }
  const std::vector<double>& last_costs() const { return costs_; }

 private:
  MppiParams params_;
  std::size_t grippers_;
  std::mt19937_64 rng_;
  std::vector<Action> nominal_;
  std::vector<double> weights_;
  std::vector<double> costs_;
};

/// Normalised softmin weights exp(-(c - min c) / lambda).
std::vector<double> softmin_weights(const std::vector<double>& costs,
                                    double temperature);

/// Stateless convenience wrapper: a fresh controller seeded with `seed`.
Action mppi_step(const RopeSimulator& sim, const SimState& state,
                 const StepCost& cost, const MppiParams& params,
                 std::uint64_t seed);

/// Declares the controller stuck when the windowed mean one-step motion of
/// the robot falls below theta times its running maximum.
class TrapDetector {
 public:
  explicit TrapDetector(int window = 20, double theta = 0.25,
                        double eps = 1e-6);

  /// Adds a robot configuration. Returns true when trapped; no verdict until
  /// the window is full.
  bool update(const Eigen::VectorXd& q);
  /// Forgets the window (after a grasp change) but keeps the running max.
  void clear_window();

  double qbar() const { return qbar_; }
  double qbar_max() const { return qbar_max_; }
  int window() const { return window_; }
  double theta() const { return theta_; }

 private:
  int window_;
  double theta_;
  double eps_;
  std::deque<Eigen::VectorXd> hist_;
  double qbar_ = 0.0;
  double qbar_max_ = 0.0;
};

}  // namespace glsig
