#include "glsig/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glsig/errors.hpp"

namespace glsig {

void validate(const MppiParams& p) {
  if (p.horizon < 1) throw ValidationError("mppi.horizon must be >= 1");
  if (p.samples < 2) throw ValidationError("mppi.samples must be >= 2");
  if (!(p.temperature > 0.0)) {
    throw ValidationError("mppi.temperature must be > 0");
  }
  if (!(p.noise_sigma >= 0.0)) {
    throw ValidationError("mppi.noise_sigma must be >= 0");
  }
  if (!(p.dt > 0.0)) throw ValidationError("mppi.dt must be > 0");
}

double goal_cost(const SimState& state, const Action& qdot, const Point3& goal_p,
                 double l_k, const CostWeights& w) {
  double c = (p_of_l(state.rope, l_k) - goal_p).norm();
  for (const auto& g : state.grippers) {
    if (g.grasping) {
      c += w.alpha1 * (p_of_l(state.rope, g.grasp_loc) - goal_p).norm();
    }
  }
  c += w.alpha2 * std::sqrt(static_cast<double>(state.contacts));
  double speed2 = 0.0;
  for (const auto& v : qdot) speed2 += v.squaredNorm();
  c += w.alpha3 * std::sqrt(speed2);
  return c;
}

std::vector<double> softmin_weights(const std::vector<double>& costs,
                                    double temperature) {
  std::vector<double> w(costs.size(), 0.0);
  if (costs.empty()) return w;
  const double best = *std::min_element(costs.begin(), costs.end());
  double sum = 0.0;
  for (std::size_t m = 0; m < costs.size(); ++m) {
    w[m] = std::isfinite(costs[m]) ? std::exp(-(costs[m] - best) / temperature)
                                   : 0.0;
    sum += w[m];
  }
  for (double& x : w) x /= sum;
  return w;
}

MppiController::MppiController(MppiParams params, std::size_t grippers,
                               std::uint64_t seed)
    : params_(params), grippers_(grippers), rng_(seed) {
  validate(params_);
  reset();
}

void MppiController::reset() {
  nominal_.assign(static_cast<std::size_t>(params_.horizon),
                  zero_action(grippers_));
}

Action MppiController::step(const RopeSimulator& sim, const SimState& state,
                            const StepCost& cost) {
  const auto H = static_cast<std::size_t>(params_.horizon);
  const auto M = static_cast<std::size_t>(params_.samples);
  const double vmax = sim.params().v_max;
  std::vector<bool> actuated(grippers_);
  for (std::size_t g = 0; g < grippers_; ++g) {
    actuated[g] = state.grippers[g].grasping;
  }
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<std::vector<Action>> seqs(M, nominal_);
  costs_.assign(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    auto& seq = seqs[m];
    for (std::size_t t = 0; t < H; ++t) {
      for (std::size_t g = 0; g < grippers_; ++g) {
        Vec3 eps(noise(rng_), noise(rng_), noise(rng_));
        Vec3& u = seq[t][g];
        if (!actuated[g]) {
          u.setZero();
          continue;
        }
        u += params_.noise_sigma * eps;
        const double speed = u.norm();
        if (speed > vmax) u *= vmax / speed;
      }
    }
    SimState s = state;
    double total = 0.0;
    for (std::size_t t = 0; t < H; ++t) {
      SimState next = sim.step(s, seq[t], params_.dt);
      total += cost(s, next, seq[t]);
      s = std::move(next);
    }
    costs_[m] = total;
  }
  weights_ = softmin_weights(costs_, params_.temperature);

  for (std::size_t t = 0; t < H; ++t) {
    for (std::size_t g = 0; g < grippers_; ++g) {
      Vec3 u = Vec3::Zero();
      for (std::size_t m = 0; m < M; ++m) u += weights_[m] * seqs[m][t][g];
      const double speed = u.norm();
      if (speed > vmax) u *= vmax / speed;
      nominal_[t][g] = u;
    }
  }
  Action first = nominal_.front();
  std::rotate(nominal_.begin(), nominal_.begin() + 1, nominal_.end());
  nominal_.back() = zero_action(grippers_);
  return first;
}

Action mppi_step(const RopeSimulator& sim, const SimState& state,
                 const StepCost& cost, const MppiParams& params,
                 std::uint64_t seed) {
  MppiController c(params, state.grippers.size(), seed);
  return c.step(sim, state, cost);
}

TrapDetector::TrapDetector(int window, double theta, double eps)
    : window_(window), theta_(theta), eps_(eps) {
  if (window_ < 2) throw ValidationError("trap window must be >= 2");
}

bool TrapDetector::update(const Eigen::VectorXd& q) {
  hist_.push_back(q);
  if (static_cast<int>(hist_.size()) > window_) hist_.pop_front();
  if (static_cast<int>(hist_.size()) < window_) return false;
  qbar_ = (hist_.back() - hist_.front()).norm() / window_;
  qbar_max_ = std::max(qbar_max_, qbar_);
  return qbar_ / std::max(qbar_max_, eps_) < theta_;
}

void TrapDetector::clear_window() { hist_.clear(); }

}  // namespace glsig
