#include "glsig/grasp_planner.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "glsig/errors.hpp"

namespace glsig {

const char* to_string(PlannerMode m) {
  return m == PlannerMode::Full ? "full" : "alternating";
}

std::string Ablation::to_string() const {
  switch (kind) {
    case Kind::Full:
      return "full";
    case Kind::NoSignature:
      return "no_signature";
    case Kind::AlwaysBlocklist:
      return "always_blocklist";
    case Kind::RolloutScored:
      return "rollout_scored:" + std::to_string(h_extra);
  }
  return "?";
}

Ablation Ablation::parse(const std::string& text) {
  if (text == "full") return {};
  if (text == "no_signature") return {Kind::NoSignature, 0};
  if (text == "always_blocklist") return {Kind::AlwaysBlocklist, 0};
  const std::string prefix = "rollout_scored:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string num = text.substr(prefix.size());
    std::size_t used = 0;
    int h = 0;
    try {
      h = std::stoi(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == num.size() && !num.empty() && h >= 1) {
      return {Kind::RolloutScored, h};
    }
  }
  throw ParseError("unknown ablation '" + text +
                   "' (expected full, no_signature, always_blocklist or "
                   "rollout_scored:<H>)");
}

void Blocklist::add(const GLSignature& sig) {
  if (!contains(sig)) entries_.push_back(sig);
}

bool Blocklist::contains(const GLSignature& sig) const {
  for (const auto& e : entries_) {
    if (signatures_equal(e, sig)) return true;
  }
  return false;
}

namespace {

GraspChange fallback_change(const SimState& state, std::mt19937_64& rng) {
  // STAY everywhere except one gripper that grasps (or re-grasps).
  const std::size_t n = state.grippers.size();
  GraspChange c{std::vector<Strategy>(n, Strategy::Stay),
                std::vector<double>(n, 0.0)};
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> loc(0.0, 1.0);
  const std::size_t i = pick(rng);
  c.strategies[i] =
      state.grippers[i].grasping ? Strategy::Move : Strategy::Grasp;
  c.locations[i] = loc(rng);
  return c;
}

GraspChange sample_full(const SimState& state, std::mt19937_64& rng,
                        const PlannerParams& params) {
  const std::size_t n = state.grippers.size();
  std::uniform_real_distribution<double> loc(0.0, 1.0);
  for (int attempt = 0; attempt < params.resample_attempts; ++attempt) {
    GraspChange c{std::vector<Strategy>(n), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
      if (state.grippers[i].grasping) {
        static constexpr Strategy kHeld[] = {Strategy::Stay, Strategy::Move,
                                             Strategy::Release};
        c.strategies[i] = kHeld[std::uniform_int_distribution<int>(0, 2)(rng)];
      } else {
        static constexpr Strategy kFree[] = {Strategy::Stay, Strategy::Grasp};
        c.strategies[i] = kFree[std::uniform_int_distribution<int>(0, 1)(rng)];
      }
      const Strategy s = c.strategies[i];
      if (s == Strategy::Grasp || s == Strategy::Move) c.locations[i] = loc(rng);
    }
    if (is_valid_change(c, state)) return c;
  }
  return fallback_change(state, rng);
}

GraspChange sample_alternating(const SimState& state, std::mt19937_64& rng,
                               const PlannerParams& params) {
  const std::size_t n = state.grippers.size();
  std::uniform_real_distribution<double> loc(0.0, 1.0);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.grippers[i].grasping) free.push_back(i);
  }
  for (int attempt = 0; attempt < params.resample_attempts; ++attempt) {
    GraspChange c{std::vector<Strategy>(n, Strategy::Stay),
                  std::vector<double>(n, 0.0)};
    if (free.empty()) {
      const std::size_t i = std::uniform_int_distribution<std::size_t>(
          0, n - 1)(rng);
      c.strategies[i] = Strategy::Move;
      c.locations[i] = loc(rng);
    } else {
      const std::size_t i = free[std::uniform_int_distribution<std::size_t>(
          0, free.size() - 1)(rng)];
      c.strategies[i] = Strategy::Grasp;
      c.locations[i] = loc(rng);
      for (std::size_t k = 0; k < n; ++k) {
        if (state.grippers[k].grasping) {
          c.strategies[k] = std::uniform_int_distribution<int>(0, 1)(rng)
                                ? Strategy::Release
                                : Strategy::Stay;
        }
      }
    }
    if (is_valid_change(c, state)) return c;
  }
  return fallback_change(state, rng);
}

}  // namespace

std::vector<GraspChange> sample_candidates(const SimState& state, int n_x,
                                           std::uint64_t seed, PlannerMode mode,
                                           const PlannerParams& params) {
  if (n_x < 1) throw OutOfRange("n_x must be >= 1");
  if (state.grippers.empty()) throw OutOfRange("no grippers to plan for");
  std::mt19937_64 rng(seed);
  std::vector<GraspChange> out;
  out.reserve(static_cast<std::size_t>(n_x));
  for (int k = 0; k < n_x; ++k) {
    out.push_back(mode == PlannerMode::Full
                      ? sample_full(state, rng, params)
                      : sample_alternating(state, rng, params));
  }
  return out;
}

double state_change(const SimState& a, const SimState& b) {
  double sum = 0.0;
  const std::size_t n = std::min(a.rope.points.size(), b.rope.points.size());
  for (std::size_t j = 0; j < n; ++j) {
    sum += (a.rope.points[j] - b.rope.points[j]).squaredNorm();
  }
  const std::size_t g = std::min(a.grippers.size(), b.grippers.size());
  for (std::size_t i = 0; i < g; ++i) {
    sum += (a.grippers[i].position - b.grippers[i].position).squaredNorm();
  }
  return std::sqrt(sum);
}

GraspCandidate simulate_candidate(const RopeSimulator& sim,
                                  const SimState& state,
                                  const GraspChange& change,
                                  const PlannerParams& params) {
  GraspCandidate c;
  c.change = change;
  PlannedChange planned =
      plan_grasp_change(sim, state, change, params.path_samples);
  c.feasible = planned.feasible;
  c.reason = planned.reason;
  c.motion_plan = std::move(planned.motion);
  c.result_state = state;
  if (c.feasible) {
    // The outcome is the stepped execution itself, so the executed change
    // lands exactly where the planner predicted.
    try {
      c.result_state = execute_grasp_change(sim, state, change);
    } catch (const GraspChangeBlocked& e) {
      c.feasible = false;
      c.reason = e.what();
    }
  }
  c.delta_s = state_change(state, c.result_state);
  return c;
}

double min_geodesic(const SimState& state, double l_k) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : state.grippers) {
    if (g.grasping) best = std::min(best, std::abs(g.grasp_loc - l_k));
  }
  return best;
}

void score_candidate(GraspCandidate& cand, const RopeSimulator& sim,
                     const PlanRequest& req, const CostWeights& w,
                     const PlannerParams& params) {
  cand.signature.reset();
  if (cand.feasible) {
    try {
      cand.signature = compute_signature(cand.result_state, sim.world(), req.l_k);
    } catch (const Error& e) {
      cand.feasible = false;
      cand.reason = std::string("signature: ") + e.what();
    }
  }
  CostTerms t;
  const double P = params.penalty;
  if (!cand.feasible) t.infeasible = P;
  using K = Ablation::Kind;
  const K kind = req.ablation.kind;
  // An unknown signature cannot match the goal signature.
  if (!cand.feasible && req.goal_sig &&
      (kind == K::Full || kind == K::AlwaysBlocklist)) {
    t.goal_mismatch = P;
  }
  if (cand.feasible && (kind == K::Full || kind == K::AlwaysBlocklist)) {
    if (req.blocklist && req.blocklist->contains(*cand.signature)) {
      t.blocklisted = P;
    }
    if (req.goal_sig && !signatures_equal(*req.goal_sig, *cand.signature)) {
      t.goal_mismatch = P;
    }
  }
  if (cand.feasible && kind == K::RolloutScored && req.rollout_score) {
    t.rollout = req.rollout_score(cand.result_state);
  }
  for (const auto& g : cand.result_state.grippers) {
    if (g.grasping) t.geodesic += std::abs(g.grasp_loc - req.l_k);
  }
  t.state_change = w.beta1 * std::min(cand.delta_s, params.delta_s_cap);
  cand.terms = t;
  cand.cost = t.total();
}

PlanResult plan_grasp(const RopeSimulator& sim, const SimState& state,
                      const PlanRequest& req, const CostWeights& w,
                      const PlannerParams& params) {
  PlanResult out;
  const auto changes =
      sample_candidates(state, params.n_x, req.seed, req.mode, params);
  out.candidates.reserve(changes.size());
  for (const auto& ch : changes) {
    out.candidates.push_back(simulate_candidate(sim, state, ch, params));
    score_candidate(out.candidates.back(), sim, req, w, params);
  }
  for (std::size_t k = 1; k < out.candidates.size(); ++k) {
    const auto& c = out.candidates[k];
    const auto& b = out.candidates[out.best];
    if (c.cost < b.cost || (c.cost == b.cost && c.delta_s < b.delta_s)) {
      out.best = k;
    }
  }
  return out;
}

bool blocklist_decision(const SimState& state, const GraspCandidate& best,
                        double l_k) {
  const double d0 = min_geodesic(state, l_k);
  const double dstar = min_geodesic(best.result_state, l_k);
  return dstar >= d0;
}

}  // namespace glsig
