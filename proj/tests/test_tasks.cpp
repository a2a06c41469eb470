#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glsig/errors.hpp"
#include "glsig/grasp_graph.hpp"
#include "glsig/tasks.hpp"
#include "glsig/topology.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

using namespace glsig;

namespace {

const PolyLoop kRing = make_circle({0, 0, 0}, Vec3::UnitZ(), 0.1, 32);

// Rope whose tip (l = 1) sits at `tip`.
RopeState rope_to(const Point3& tip) {
  return scenes::rope_along({tip - Vec3(0.4, 0, 0), tip}, 9);
}

std::vector<Vec3> sphere_directions(int n) {
  std::vector<Vec3> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    out.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
  }
  return out;
}

Vec3 best_direction(const Point3& p, int direction, double f_ref) {
  const RopeState prev = rope_to(p);
  Vec3 best = Vec3::Zero();
  double lo = INFINITY;
  for (const Vec3& d : sphere_directions(2000)) {
    const double c =
        magnetic_cost(prev, rope_to(p + 0.01 * d), kRing, direction, 1.0, f_ref);
    if (c < lo) {
      lo = c;
      best = d;
    }
  }
  return best;
}

void expect_same_trial(const TrialResult& a, const TrialResult& b) {
  EXPECT_EQ(a.success, b.success);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.regrasps, b.regrasps);
  EXPECT_EQ(a.sim_time, b.sim_time);
  EXPECT_EQ(a.final_distance, b.final_distance);
  EXPECT_EQ(a.max_strain, b.max_strain);
  ASSERT_EQ(a.signature_history.size(), b.signature_history.size());
  for (std::size_t k = 0; k < a.signature_history.size(); ++k) {
    EXPECT_EQ(a.signature_history[k].first, b.signature_history[k].first);
    EXPECT_EQ(a.signature_history[k].second, b.signature_history[k].second);
  }
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    EXPECT_EQ(a.events[k].kind, b.events[k].kind);
    EXPECT_EQ(a.events[k].detail, b.events[k].detail);
  }
}

struct FloorScene {
  RopeSimulator sim;
  SimState state;
};

FloorScene floor_scene() {
  WorldConfig w;
  w.floor_z = 0.0;
  SimState s;
  s.rope = scenes::rope_along({{0.3, -0.3, 0.005}, {0.3, 0.3, 0.005}}, 15);
  s.grippers = {scenes::holding(s.rope, 0.3), scenes::free_at({0.0, 0.3, 0.3})};
  RopeSimulator sim(w);
  return {sim, sim.settle(s, 10)};
}

TaskParams small_params() {
  TaskParams p;
  p.mppi.samples = 16;
  p.mppi.horizon = 8;
  p.planner.n_x = 6;
  p.trap_window = 5;
  return p;
}

}  // namespace

TEST(LoopPlane, CircleNormalFollowsOrientation) {
  const LoopPlane pl = fit_loop_plane(kRing);
  EXPECT_NEAR(pl.normal.z(), 1.0, 1e-12);
  EXPECT_NEAR(pl.residual, 0.0, 1e-12);
  EXPECT_NEAR(pl.diameter, 0.2, 1e-12);
  const LoopPlane rev = fit_loop_plane(make_circle({0, 0, 0}, -Vec3::UnitZ(), 0.1, 32));
  EXPECT_NEAR(rev.normal.z(), -1.0, 1e-12);
}

TEST(LoopPlane, NonPlanarThrows) {
  const PolyLoop saddle({{0.1, 0, 0.05}, {0, 0.1, -0.05}, {-0.1, 0, 0.05}, {0, -0.1, -0.05}});
  EXPECT_THROW(fit_loop_plane(saddle), NonPlanarLoop);
  EXPECT_THROW(disc_penetration(rope_to({0, 0, -0.1}), rope_to({0, 0, 0.1}),
                                saddle, 1, 1.0),
               NonPlanarLoop);
}

TEST(DiscPenetration, ThroughCentreInCommandedDirection) {
  EXPECT_TRUE(disc_penetration(rope_to({0, 0, -0.02}), rope_to({0, 0, 0.02}), kRing, 1, 1.0));
}

TEST(DiscPenetration, OutsideDiscIsFalse) {
  EXPECT_FALSE(disc_penetration(rope_to({0.15, 0, -0.02}), rope_to({0.15, 0, 0.02}), kRing, 1, 1.0));
}

TEST(DiscPenetration, OppositeDirectionIsFalse) {
  EXPECT_FALSE(disc_penetration(rope_to({0, 0, -0.02}), rope_to({0, 0, 0.02}), kRing, -1, 1.0));
  EXPECT_TRUE(disc_penetration(rope_to({0, 0, 0.02}), rope_to({0, 0, -0.02}), kRing, -1, 1.0));
}

TEST(DiscPenetration, NoCrossingIsFalse) {
  EXPECT_FALSE(disc_penetration(rope_to({0, 0, 0.01}), rope_to({0, 0, 0.05}), kRing, 1, 1.0));
}

// A random keypoint segment crosses the disc iff its plane crossing lies
// within radius (for a fine polygon) and the sign matches.
TEST(DiscPenetrationProperty, MatchesAnalyticDisc) {
  const PolyLoop fine = make_circle({0, 0, 0}, Vec3::UnitZ(), 0.1, 256);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 500; ++k) {
    const Point3 a(u(rng), u(rng), u(rng));
    const Point3 b(u(rng), u(rng), u(rng));
    bool expect = false;
    if (a.z() < 0.0 && b.z() >= 0.0) {
      const Point3 x = a + (a.z() / (a.z() - b.z())) * (b - a);
      const double r = x.head<2>().norm();
      if (std::abs(r - 0.1) < 1e-3) continue;
      expect = r < 0.1;
    }
    EXPECT_EQ(disc_penetration(rope_to(a), rope_to(b), fine, 1, 1.0), expect);
  }
}

TEST(MagneticCost, AxialMotionIsOptimal) {
  const Point3 p(0, 0, -0.05);
  const Vec3 f = loop_field(kRing, p);
  EXPECT_NEAR(f.normalized().z(), 1.0, 1e-9);
  EXPECT_GT(best_direction(p, 1, 0.0).z(), 0.999);
  const double along = magnetic_cost(rope_to(p), rope_to(p + Vec3(0, 0, 0.01)), kRing, 1, 1.0, 0.0);
  EXPECT_NEAR(along, 0.0, 1e-9);
}

TEST(MagneticCost, ReversedDirectionFlipsOptimum) {
  EXPECT_LT(best_direction({0, 0, -0.05}, -1, 0.0).z(), -0.999);
}

TEST(MagneticCost, ZeroDisplacementCostsWeight) {
  const Point3 p(0, 0, -0.05);
  EXPECT_DOUBLE_EQ(magnetic_cost(rope_to(p), rope_to(p), kRing, 1, 1.0, 0.0, 2.5), 2.5);
}

TEST(MagneticCost, DegenerateOnTheLoop) {
  const Point3 p(0.1, 0, 0);
  EXPECT_THROW(magnetic_cost(rope_to(p), rope_to(p + Vec3(0, 0, 0.01)), kRing, 1, 1.0, 0.0),
               DegenerateGeometry);
}

// Field magnitude checked against brute-force quadrature; far away the
// faded cost is flat in the displacement direction.
TEST(MagneticCost, FieldDecaysFarFromFixture) {
  auto oracle_field = [](const Point3& r) {
    Vec3 f = Vec3::Zero();
    for (std::size_t i = 0; i < kRing.segment_count(); ++i) {
      f += oracle::biot_savart_quadrature(kRing.segment_start(i), kRing.segment_end(i), r, 2000);
    }
    return f;
  };
  const Point3 near(0.02, 0.01, 0.05);
  const Point3 far(3.0, -2.0, 4.0);
  const Vec3 fn = loop_field(kRing, near);
  const Vec3 ff = loop_field(kRing, far);
  EXPECT_LT((fn - oracle_field(near)).norm(), 1e-6 * fn.norm());
  EXPECT_LT((ff - oracle_field(far)).norm(), 1e-6 * ff.norm());
  EXPECT_LT(ff.norm(), 1e-4 * fn.norm());

  const double f_ref = loop_field(kRing, Point3::Zero()).norm();
  double lo = INFINITY, hi = -INFINITY;
  for (const Vec3& d : sphere_directions(200)) {
    const double c = magnetic_cost(rope_to(far), rope_to(far + 0.01 * d), kRing, 1, 1.0, f_ref);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  EXPECT_LT(hi - lo, 1e-3);
}

TEST(PointReaching, AlreadyAtGoal) {
  const auto sc = floor_scene();
  PointGoal g;
  g.goal_p = p_of_l(sc.state.rope, 1.0);
  const auto r = point_reaching(sc.sim, sc.state, g, small_params(), 1);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.regrasps, 0);
  EXPECT_FALSE(r.signature_history.empty());
}

TEST(PointReaching, ZeroIterationBudgetFails) {
  const auto sc = floor_scene();
  PointGoal g;
  g.goal_p = {0.8, 0.0, 0.2};
  TaskParams p = small_params();
  p.i_max = 0;
  const auto r = point_reaching(sc.sim, sc.state, g, p, 1);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.regrasps, 0);
}

TEST(PointReaching, SeedDeterminism) {
  const auto sc = floor_scene();
  PointGoal g;
  g.goal_p = {0.7, 0.2, 0.1};
  TaskParams p = small_params();
  p.i_max = 40;
  const auto a = point_reaching(sc.sim, sc.state, g, p, 5);
  const auto b = point_reaching(sc.sim, sc.state, g, p, 5);
  expect_same_trial(a, b);
  EXPECT_LE(a.max_strain, 0.05);
  EXPECT_LT(a.max_residual, 1e-3);
}

TEST(Threading, AlreadyThreadedAdvancesImmediately) {
  const auto f = scenes::fig3_scene();
  const RopeSimulator sim(f.world);
  ThreadingPlan plan;
  plan.subgoals = {{"A", 1, compute_signature(f.state, f.world, 1.0)}};
  plan.final.goal_p = p_of_l(f.state.rope, 1.0);
  plan.final.goal_d = 0.05;
  TaskParams p = small_params();
  p.i_max = 1;
  const auto r = threading(sim, f.state, plan, p, 3);
  ASSERT_FALSE(r.events.empty());
  EXPECT_EQ(r.events.front().kind, "subgoal");
  EXPECT_EQ(r.events.front().iteration, 0);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.penetrations, std::vector<int>{0});
}

TEST(Threading, UnknownLoopRejected) {
  const auto f = scenes::fig3_scene();
  const RopeSimulator sim(f.world);
  ThreadingPlan plan;
  plan.subgoals = {{"Z", 1, GLSignature::parse("{[0,0,0]}")}};
  EXPECT_THROW(threading(sim, f.state, plan, small_params(), 0), ValidationError);
}
