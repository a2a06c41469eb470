#include "glsig/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

#include <Eigen/Dense>

#include "glsig/errors.hpp"
#include "glsig/grasp_change.hpp"
#include "glsig/grasp_graph.hpp"
#include "glsig/topology.hpp"

namespace glsig {

LoopPlane fit_loop_plane(const PolyLoop& loop) {
  const auto& pts = loop.points();
  LoopPlane pl;
  pl.center = Point3::Zero();
  for (const auto& p : pts) pl.center += p;
  pl.center /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - pl.center) * (p - pl.center).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  pl.normal = eig.eigenvectors().col(0);
  Vec3 area = Vec3::Zero();
  for (std::size_t i = 0; i < loop.segment_count(); ++i) {
    area += (loop.segment_start(i) - pl.center)
                .cross(loop.segment_end(i) - pl.center);
  }
  if (area.dot(pl.normal) < 0.0) pl.normal = -pl.normal;
  pl.u = eig.eigenvectors().col(2);
  pl.v = pl.normal.cross(pl.u);
  pl.residual = 0.0;
  pl.diameter = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pl.residual =
        std::max(pl.residual, std::abs((pts[i] - pl.center).dot(pl.normal)));
    for (std::size_t k = i + 1; k < pts.size(); ++k) {
      pl.diameter = std::max(pl.diameter, (pts[i] - pts[k]).norm());
    }
  }
  if (pl.residual > 0.1 * pl.diameter) {
    throw NonPlanarLoop("loop deviates " + std::to_string(pl.residual) +
                        " m from its best-fit plane (diameter " +
                        std::to_string(pl.diameter) + " m)");
  }
  return pl;
}

namespace {

bool inside_polygon(const std::vector<Eigen::Vector2d>& poly,
                    const Eigen::Vector2d& q) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) in = !in;
    }
  }
  return in;
}

}  // namespace

bool disc_penetration(const RopeState& prev, const RopeState& next,
                      const PolyLoop& loop, int direction, double l_k) {
  const LoopPlane pl = fit_loop_plane(loop);
  const Point3 a = p_of_l(prev, l_k);
  const Point3 b = p_of_l(next, l_k);
  const double da = (a - pl.center).dot(pl.normal);
  const double db = (b - pl.center).dot(pl.normal);
  const bool forward = da < 0.0 && db >= 0.0;
  const bool backward = da > 0.0 && db <= 0.0;
  if (!(direction > 0 ? forward : backward)) return false;
  const Point3 x = a + (da / (da - db)) * (b - a);
  std::vector<Eigen::Vector2d> poly;
  poly.reserve(loop.size());
  for (const auto& p : loop.points()) {
    poly.emplace_back((p - pl.center).dot(pl.u), (p - pl.center).dot(pl.v));
  }
  return inside_polygon(
      poly, {(x - pl.center).dot(pl.u), (x - pl.center).dot(pl.v)});
}

double magnetic_cost(const RopeState& prev, const RopeState& next,
                     const PolyLoop& loop, int direction, double l_k,
                     double f_ref, double w_mag) {
  const Point3 a = p_of_l(prev, l_k);
  const Vec3 d = p_of_l(next, l_k) - a;
  const double len = d.norm();
  if (len < 1e-12) return w_mag;
  const Vec3 f = loop_field(loop, a);
  const double fn = f.norm();
  if (fn < 1e-300) return w_mag;
  const double s = f_ref > 0.0 ? std::min(1.0, fn / f_ref) : 1.0;
  const double align = f.dot(d) / (fn * len);
  return w_mag * (1.0 - s * static_cast<double>(direction) * align);
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string sig_text(const std::optional<GLSignature>& s) {
  return s ? s->to_string() : std::string("n/a");
}

// Shared bookkeeping for both task drivers.
class Trial {
 public:
  Trial(const RopeSimulator& sim, const SimState& start,
        const TaskParams& params, std::uint64_t seed, double l_k)
      : sim_(sim),
        params_(params),
        seed_(seed),
        l_k_(l_k),
        state_(start),
        ctrl_(params.mppi, start.grippers.size(), seed),
        trap_(params.trap_window, params.trap_theta),
        t0_(std::chrono::steady_clock::now()) {
    result_.seed = seed;
    observe(state_);
    record_signature(0);
  }

  SimState& state() { return state_; }
  TrialResult& result() { return result_; }
  MppiController& controller() { return ctrl_; }
  TrapDetector& trap() { return trap_; }
  double l_k() const { return l_k_; }
  void set_l_k(double l) { l_k_ = l; }

  std::optional<GLSignature> signature(const SimState& s) const {
    try {
      return compute_signature(s, sim_.world(), l_k_);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void record_signature(int iteration) {
    auto sig = signature(state_);
    if (!sig) return;
    auto& h = result_.signature_history;
    if (h.empty() || !(h.back().second == *sig)) h.emplace_back(iteration, *sig);
  }

  void observe(const SimState& s) {
    result_.max_strain = std::max(result_.max_strain, max_strain(s.rope));
    result_.max_residual =
        std::max(result_.max_residual, constraint_residual(s, sim_.world()));
  }

  // Steps that would enter a guarded signature are dropped; the state holds
  // still and trap detection takes over.
  void mpc_step(int iteration, const StepCost& cost) {
    const Action a = ctrl_.step(sim_, state_, cost);
    SimState next = sim_.step(state_, a, params_.mppi.dt);
    ++steps_;
    if (guard_ && guard_->size() > 0) {
      const auto now = signature(next);
      const auto& h = result_.signature_history;
      if (now && !h.empty() && !(h.back().second == *now) &&
          guard_->contains(*now)) {
        return;
      }
    }
    state_ = std::move(next);
    observe(state_);
    record_signature(iteration);
  }

  void guard(const Blocklist* b) { guard_ = b; }
  bool guarded(const GLSignature& sig) const {
    return guard_ && guard_->contains(sig);
  }

  bool trapped() { return trap_.update(robot_configuration(state_)); }

  void event(int i, std::string kind, std::string detail = {}) {
    result_.events.push_back({i, std::move(kind), std::move(detail),
                              sig_text(signature(state_)),
                              min_geodesic(state_, l_k_)});
  }

  PlanResult plan(PlanRequest req) {
    req.seed = mix_seed(seed_, plan_calls_++);
    req.ablation = params_.ablation;
    if (params_.ablation.kind == Ablation::Kind::RolloutScored) {
      req.rollout_score = rollout_scorer_;
    }
    return plan_grasp(sim_, state_, req, params_.weights, params_.planner);
  }

  void set_rollout_scorer(std::function<double(const SimState&)> f) {
    rollout_scorer_ = std::move(f);
  }

  // Executes a planned candidate. Returns true when the grasp state changed.
  bool execute(int i, const GraspCandidate& cand) {
    trap_.clear_window();
    if (!cand.feasible) {
      event(i, "no_regrasp", "best candidate is infeasible: " + cand.reason);
      return false;
    }
    if (is_noop(cand.change)) {
      event(i, "no_regrasp", "best candidate keeps the current grasps");
      return false;
    }
    auto count = [this](const SimState& s) {
      ++steps_;
      observe(s);
    };
    try {
      state_ = execute_grasp_change(sim_, state_, cand.change, count);
    } catch (const GraspChangeBlocked& e) {
      state_ = e.state;
      event(i, "blocked", e.what());
    }
    ++result_.regrasps;
    const double g = min_geodesic(state_, l_k_);
    result_.regrasp_geodesics.push_back(g);
    event(i, "regrasp", describe(cand.change));
    ctrl_.reset();
    record_signature(i);
    return true;
  }

  void finish(int iterations, bool success, const Point3& goal, double l_k) {
    result_.iterations = iterations;
    result_.success = success;
    result_.sim_time = static_cast<double>(steps_) * params_.mppi.dt;
    result_.final_distance = (p_of_l(state_.rope, l_k) - goal).norm();
    result_.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0_)
                            .count();
  }

  static std::string describe(const GraspChange& c) {
    std::string out;
    for (std::size_t k = 0; k < c.strategies.size(); ++k) {
      if (k) out += ' ';
      out += to_string(c.strategies[k]);
      if (c.strategies[k] == Strategy::Grasp ||
          c.strategies[k] == Strategy::Move) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "@%.3f", c.locations[k]);
        out += buf;
      }
    }
    return out;
  }

 private:
  const RopeSimulator& sim_;
  const TaskParams& params_;
  std::uint64_t seed_;
  double l_k_;
  SimState state_;
  MppiController ctrl_;
  TrapDetector trap_;
  std::chrono::steady_clock::time_point t0_;
  TrialResult result_;
  long steps_ = 0;
  std::uint64_t plan_calls_ = 0;
  std::function<double(const SimState&)> rollout_scorer_;
  const Blocklist* guard_ = nullptr;
};

StepCost point_cost(const Point3& goal, double l_k, const CostWeights& w) {
  return [goal, l_k, w](const SimState&, const SimState& next,
                        const Action& a) {
    return goal_cost(next, a, goal, l_k, w);
  };
}

bool any_grasping(const SimState& s) {
  return std::any_of(s.grippers.begin(), s.grippers.end(),
                     [](const GripperState& g) { return g.grasping; });
}

std::function<double(const SimState&)> make_rollout_scorer(
    const RopeSimulator& sim, const TaskParams& params, const PointGoal& goal,
    std::uint64_t seed) {
  const int h = params.ablation.h_extra;
  return [&sim, &params, goal, seed, h](const SimState& start) {
    MppiController c(params.mppi, start.grippers.size(), seed);
    const StepCost cost = point_cost(goal.goal_p, goal.l_k, params.weights);
    SimState s = start;
    for (int k = 0; k < h; ++k) {
      s = sim.step(s, c.step(sim, s, cost), params.mppi.dt);
    }
    return goal_cost(s, zero_action(s.grippers.size()), goal.goal_p, goal.l_k,
                     params.weights);
  };
}

}  // namespace

TrialResult point_reaching(const RopeSimulator& sim, const SimState& start,
                           const PointGoal& goal, const TaskParams& params,
                           std::uint64_t seed) {
  Trial t(sim, start, params, seed, goal.l_k);
  if (params.ablation.kind == Ablation::Kind::RolloutScored) {
    t.set_rollout_scorer(make_rollout_scorer(sim, params, goal, seed));
  }
  const StepCost cost = point_cost(goal.goal_p, goal.l_k, params.weights);
  auto reached = [&] {
    return (goal.goal_p - p_of_l(t.state().rope, goal.l_k)).norm() <
           goal.goal_d;
  };
  const bool always_block =
      params.ablation.kind == Ablation::Kind::AlwaysBlocklist;
  Blocklist blocklist;
  if (params.ablation.kind != Ablation::Kind::NoSignature) t.guard(&blocklist);

  auto base_request = [&] {
    PlanRequest req;
    req.l_k = goal.l_k;
    req.blocklist = &blocklist;
    req.mode = params.planner.mode;
    return req;
  };

  if (reached()) {
    t.finish(0, true, goal.goal_p, goal.l_k);
    return t.result();
  }
  if (!any_grasping(t.state())) {
    PlanResult p = t.plan(base_request());
    t.execute(0, p.chosen());
  }

  int i = 0;
  bool success = false;
  while (i < params.i_max) {
    ++i;
    t.mpc_step(i, cost);
    if (reached()) {
      success = true;
      break;
    }
    if (!t.trapped()) continue;

    const auto sig = t.signature(t.state());
    t.event(i, "trap");
    PlanResult p = t.plan(base_request());
    if (always_block || blocklist_decision(t.state(), p.chosen(), goal.l_k)) {
      if (sig) {
        blocklist.add(*sig);
        t.event(i, "blocklist", sig->to_string());
      }
      p = t.plan(base_request());
    }
    const GraspCandidate& best = p.chosen();
    if (best.feasible && best.signature && blocklist.contains(*best.signature)) {
      const bool stays = sig && *best.signature == *sig;
      if (t.guarded(*best.signature) && !is_noop(best.change) && !stays) {
        t.event(i, "no_regrasp", "best candidate is blocklisted");
        t.trap().clear_window();
        continue;
      }
      ++t.result().reattempts;
    }
    t.execute(i, best);
  }
  t.result().blocklist = blocklist.entries();
  t.finish(i, success, goal.goal_p, goal.l_k);
  return t.result();
}

TrialResult threading(const RopeSimulator& sim, const SimState& start,
                      const ThreadingPlan& plan, const TaskParams& params,
                      std::uint64_t seed) {
  const std::size_t n = plan.subgoals.size();
  struct Fixture {
    const PolyLoop* loop;
    int direction;
    Point3 goal;
    double f_ref;
  };
  std::vector<Fixture> fixtures;
  for (const auto& sg : plan.subgoals) {
    const NamedLoop* named = sim.world().skeleton.find(sg.loop);
    if (!named) throw ValidationError("unknown skeleton loop '" + sg.loop + "'");
    const LoopPlane pl = fit_loop_plane(named->loop);
    fixtures.push_back(
        {&named->loop, sg.direction,
         pl.center + static_cast<double>(sg.direction) * params.subgoal_offset *
                         pl.normal,
         loop_field(named->loop, pl.center).norm()});
  }

  const double l_k = plan.final.l_k;
  Trial t(sim, start, params, seed, l_k);
  t.result().penetrations.assign(n, 0);
  const StepCost final_cost =
      point_cost(plan.final.goal_p, l_k, params.weights);

  std::size_t j = 0;
  auto advance = [&](int i) {
    while (j < n) {
      const auto sig = t.signature(t.state());
      if (!sig || !(*sig == plan.subgoals[j].signature)) break;
      t.event(i, "subgoal", "reached " + plan.subgoals[j].loop);
      ++j;
    }
  };
  advance(0);

  int i = 0;
  bool success = false;
  while (i < params.i_max) {
    ++i;
    if (j >= n) {
      t.mpc_step(i, final_cost);
      if ((plan.final.goal_p - p_of_l(t.state().rope, l_k)).norm() <
          plan.final.goal_d) {
        success = true;
        break;
      }
      continue;
    }

    const Fixture& fx = fixtures[j];
    const Subgoal& sg = plan.subgoals[j];
    const StepCost cost = [&](const SimState& prev, const SimState& next,
                              const Action& a) {
      return goal_cost(next, a, fx.goal, l_k, params.weights) +
             magnetic_cost(prev.rope, next.rope, *fx.loop, fx.direction, l_k,
                           fx.f_ref, params.w_mag);
    };
    const RopeState before = t.state().rope;
    t.mpc_step(i, cost);

    bool replanned = false;
    if (disc_penetration(before, t.state().rope, *fx.loop, fx.direction, l_k)) {
      ++t.result().penetrations[j];
      t.event(i, "penetration", sg.loop);
      PlanRequest req;
      req.l_k = 1.0;
      req.goal_sig = sg.signature;
      req.mode = PlannerMode::Alternating;
      PlanResult p = t.plan(req);
      const GraspCandidate& best = p.chosen();
      if (best.feasible && best.signature && *best.signature == sg.signature) {
        if (t.execute(i, best)) {
          const auto now = t.signature(t.state());
          if (!now || !(*now == sg.signature)) {
            t.event(i, "deviation",
                    "signature after grasp change differs from the subgoal");
          }
        }
      } else {
        t.event(i, "rejected",
                "planned signature " + sig_text(best.signature) +
                    " differs from the subgoal");
      }
      replanned = true;
    }
    if (!replanned && t.trapped()) {
      t.event(i, "trap");
      double l = 1.0;
      bool any = false;
      for (const auto& g : t.state().grippers) {
        if (g.grasping) {
          l = any ? std::max(l, g.grasp_loc) : g.grasp_loc;
          any = true;
        }
      }
      PlanRequest req;
      req.l_k = std::clamp(l - params.trap_backoff, 0.0, 1.0);
      req.goal_sig = t.signature(t.state());
      req.mode = PlannerMode::Alternating;
      PlanResult p = t.plan(req);
      t.execute(i, p.chosen());
    }
    advance(i);
  }
  t.finish(i, success, plan.final.goal_p, l_k);
  return t.result();
}

}  // namespace glsig
