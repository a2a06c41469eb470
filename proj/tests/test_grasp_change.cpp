#include <gtest/gtest.h>

#include "glsig/errors.hpp"
#include "glsig/grasp_change.hpp"
#include "support/scenes.hpp"

using namespace glsig;

namespace {

using S = Strategy;

struct Scene {
  RopeSimulator sim;
  SimState state;
};

// Rope lying on the floor along y, gripper 0 holding the middle.
Scene floor_scene() {
  WorldConfig w;
  w.floor_z = 0.0;
  SimState s;
  s.rope = scenes::rope_along({{0.3, -0.3, 0.005}, {0.3, 0.3, 0.005}}, 31);
  s.grippers = {scenes::holding(s.rope, 0.5), scenes::free_at({0.0, 0.3, 0.3})};
  RopeSimulator sim(w);
  return {sim, sim.settle(s, 10)};
}

// Same rope draped over a low wall at y in [0.05, 0.1]; the middle of the
// rope hangs on the -y side of the wall.
Scene wall_scene() {
  WorldConfig w;
  w.floor_z = 0.0;
  w.obstacles = {Box{{0.1, 0.05, 0.0}, {0.5, 0.1, 0.15}}};
  SimState s;
  s.rope = scenes::rope_along({{0.3, -0.3, 0.16}, {0.3, 0.3, 0.16}}, 31);
  s.grippers = {scenes::holding(s.rope, 0.4), scenes::free_at({0.0, 0.3, 0.3})};
  RopeSimulator sim(w);
  return {sim, sim.settle(s, 100)};
}

}  // namespace

TEST(Validity, StrategyRules) {
  const auto sc = floor_scene();
  const auto& st = sc.state;
  EXPECT_TRUE(is_valid_change({{S::Stay, S::Stay}, {0, 0}}, st));
  EXPECT_TRUE(is_valid_change({{S::Move, S::Grasp}, {0.9, 0.1}}, st));
  EXPECT_FALSE(is_valid_change({{S::Grasp, S::Stay}, {0.9, 0}}, st));
  EXPECT_FALSE(is_valid_change({{S::Stay, S::Move}, {0, 0.2}}, st));
  EXPECT_FALSE(is_valid_change({{S::Stay, S::Release}, {0, 0}}, st));
  EXPECT_FALSE(is_valid_change({{S::Move, S::Stay}, {1.5, 0}}, st));
  EXPECT_FALSE(is_valid_change({{S::Stay}, {0}}, st));
  // Nothing would hold the rope afterwards.
  EXPECT_FALSE(is_valid_change({{S::Release, S::Stay}, {0, 0}}, st));
  EXPECT_TRUE(is_valid_change({{S::Release, S::Grasp}, {0, 0.2}}, st));
  EXPECT_EQ(grasping_after({{S::Release, S::Grasp}, {0, 0.2}}, st), 1);
  EXPECT_EQ(grasping_after({{S::Stay, S::Grasp}, {0, 0.2}}, st), 2);
  EXPECT_TRUE(is_noop({{S::Stay, S::Stay}, {0.3, 0.7}}));
  EXPECT_FALSE(is_noop({{S::Stay, S::Grasp}, {0, 0.2}}));
}

TEST(Execute, BothStayLeavesStateUnchanged) {
  const auto sc = floor_scene();
  int calls = 0;
  const SimState out = execute_grasp_change(sc.sim, sc.state, {{S::Stay, S::Stay}, {0, 0}},
                                            [&](const SimState&) { ++calls; });
  EXPECT_EQ(out.rope.points, sc.state.rope.points);
  EXPECT_EQ(calls, 0);
}

TEST(Execute, MoveInFreeSpace) {
  const auto sc = floor_scene();
  int calls = 0;
  const SimState out =
      execute_grasp_change(sc.sim, sc.state, {{S::Move, S::Stay}, {0.9, 0}},
                           [&](const SimState&) { ++calls; });
  EXPECT_TRUE(out.grippers[0].grasping);
  EXPECT_DOUBLE_EQ(out.grippers[0].grasp_loc, 0.9);
  EXPECT_FALSE(out.grippers[1].grasping);
  EXPECT_LT(constraint_residual(out, sc.sim.world()), 1e-3);
  EXPECT_GT(calls, sc.sim.params().settle_steps);
}

TEST(Execute, GraspWithSecondGripper) {
  const auto sc = floor_scene();
  const SimState out =
      execute_grasp_change(sc.sim, sc.state, {{S::Stay, S::Grasp}, {0, 0.1}});
  EXPECT_TRUE(out.grippers[0].grasping);
  EXPECT_TRUE(out.grippers[1].grasping);
  EXPECT_DOUBLE_EQ(out.grippers[1].grasp_loc, 0.1);
  EXPECT_LT(constraint_residual(out, sc.sim.world()), 1e-3);
}

TEST(Execute, InvalidChangeThrows) {
  const auto sc = floor_scene();
  EXPECT_THROW(execute_grasp_change(sc.sim, sc.state, {{S::Grasp, S::Stay}, {0.2, 0}}),
               OutOfRange);
}

TEST(Execute, MoveThroughWallIsBlocked) {
  const auto sc = wall_scene();
  ASSERT_LT(p_of_l(sc.state.rope, 0.4).y(), 0.05);
  ASSERT_GT(p_of_l(sc.state.rope, 0.95).y(), 0.1);
  const GraspChange change{{S::Move, S::Stay}, {0.95, 0}};
  const PlannedChange plan = plan_grasp_change(sc.sim, sc.state, change);
  EXPECT_FALSE(plan.feasible);
  EXPECT_NE(plan.reason.find("path"), std::string::npos);
  try {
    execute_grasp_change(sc.sim, sc.state, change);
    FAIL() << "expected PathBlocked";
  } catch (const GraspChangeBlocked& e) {
    EXPECT_FALSE(e.state.grippers[0].grasping);
    EXPECT_FALSE(sc.sim.gripper_collides(e.state.grippers[0].position));
  }
}

TEST(Plan, FeasibleMoveTeleports) {
  const auto sc = floor_scene();
  const PlannedChange plan =
      plan_grasp_change(sc.sim, sc.state, {{S::Move, S::Grasp}, {0.9, 0.1}});
  ASSERT_TRUE(plan.feasible) << plan.reason;
  EXPECT_EQ(plan.motion[0].size(), 2u);
  EXPECT_EQ(plan.motion[1].size(), 2u);
  EXPECT_DOUBLE_EQ(plan.state.grippers[0].grasp_loc, 0.9);
  EXPECT_DOUBLE_EQ(plan.state.grippers[1].grasp_loc, 0.1);
  EXPECT_LT(constraint_residual(plan.state, sc.sim.world()), 1e-3);
  // Planning never touches the input.
  EXPECT_DOUBLE_EQ(sc.state.grippers[0].grasp_loc, 0.5);
}

TEST(Plan, ReportsInfeasibility) {
  auto sc = floor_scene();
  EXPECT_FALSE(plan_grasp_change(sc.sim, sc.state, {{S::Release, S::Stay}, {0, 0}})
                   .feasible);
  // Second grasp too close to the first.
  const PlannedChange close =
      plan_grasp_change(sc.sim, sc.state, {{S::Stay, S::Grasp}, {0, 0.51}});
  EXPECT_FALSE(close.feasible);
  EXPECT_FALSE(close.reason.empty());
  // Target outside the reach sphere.
  WorldConfig w = sc.sim.world();
  w.reach = 0.35;
  const RopeSimulator short_arm(w);
  const PlannedChange far =
      plan_grasp_change(short_arm, sc.state, {{S::Stay, S::Grasp}, {0, 0.0}});
  EXPECT_FALSE(far.feasible);
  EXPECT_NE(far.reason.find("reach"), std::string::npos);
}

TEST(Strategy, Names) {
  EXPECT_STREQ(to_string(S::Stay), "STAY");
  EXPECT_STREQ(to_string(S::Grasp), "GRASP");
  EXPECT_STREQ(to_string(S::Move), "MOVE");
  EXPECT_STREQ(to_string(S::Release), "RELEASE");
}
