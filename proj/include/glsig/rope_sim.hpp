#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "glsig/geometry.hpp"

namespace glsig {

/// Ordered chain of rope points with a uniform rest length per segment.
struct RopeState {
  std::vector<Point3> points;
  double rest_len = 0.0;

  std::size_t size() const { return points.size(); }
  double total_length() const {
    return rest_len * static_cast<double>(points.size() - 1);
  }
};

struct GripperState {
  Point3 position = Point3::Zero();
  bool grasping = false;
  double grasp_loc = 0.0;  ///< valid only while grasping
};

struct SimState {
  RopeState rope;
  std::vector<GripperState> grippers;
  int contacts = 0;  ///< contact pairs found by the last step
};

/// Axis-aligned box.
struct Box {
  Vec3 lo;
  Vec3 hi;
};

struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};

using Obstacle = std::variant<Box, Capsule>;

/// A rope end fixed to the world.
struct Attach {
  double loc = 0.0;  ///< 0 or 1
  Point3 point = Point3::Zero();
};

struct WorldConfig {
  std::vector<Obstacle> obstacles;
  Skeleton skeleton;
  std::optional<Attach> attach;
  Vec3 gravity{0.0, 0.0, -9.81};
  Point3 base = Point3::Zero();
  /// Ground plane height. Rope and grippers stay above it; it never counts as
  /// a contact.
  std::optional<double> floor_z;
  /// Grippers stay within this distance of the base.
  double reach = std::numeric_limits<double>::infinity();
};

struct SimParams {
  double dt = 0.05;
  int iterations = 20;
  int newton_iterations = 4;
  /// Cap on the gravity displacement per step, in m. The simulator is
  /// quasi-static, so this only sets how fast slack rope falls; large values
  /// leave hanging spans stretched.
  double max_drift = 0.005;
  double grasp_radius = 0.05;
  double v_max = 0.2;
  double gripper_radius = 0.02;
  double rope_radius = 0.005;
  int min_grasp_gap_segments = 2;
  double contact_tolerance = 1e-3;
  double max_strain = 0.05;
  int settle_steps = 40;
  int grasp_settle_steps = 5;
};

/// Per-gripper linear velocity, m/s.
using Action = std::vector<Vec3>;

Action zero_action(std::size_t grippers);

/// Point at material location l in [0,1] (interpolation over the rest-length
/// parameterisation, which is the arc length of the unstretched rope).
Point3 p_of_l(const RopeState& rope, double l);

/// Largest |len/rest - 1| over all segments.
double max_strain(const RopeState& rope);

/// Largest violation of the grasp and attach equality constraints, in m.
double constraint_residual(const SimState& state, const WorldConfig& world);

/// Stacked gripper positions (the robot state used by trap detection).
Eigen::VectorXd robot_configuration(const SimState& state);

/// Quasi-static position-based rope simulator with floating grippers.
///
/// The simulator is an immutable value: copies share the world description
/// and every method is const, so rollouts can use independent copies.
class RopeSimulator {
 public:
  explicit RopeSimulator(WorldConfig world, SimParams params = {});

  const WorldConfig& world() const { return *world_; }
  const SimParams& params() const { return params_; }

  /// Advances one step of params().dt.
  SimState step(const SimState& state, const Action& action) const;
  SimState step(const SimState& state, const Action& action, double dt) const;
  /// Runs `steps` zero-action steps.
  SimState settle(const SimState& state, int steps) const;

  SimState try_grasp(const SimState& state, std::size_t gripper, double l,
                     bool teleport = false) const;
  SimState release(const SimState& state, std::size_t gripper) const;

  /// True when a gripper sphere centred at `p` penetrates an obstacle.
  bool gripper_collides(const Point3& p) const;
  /// Gripper position is inside the workspace (reach sphere, above floor).
  bool in_workspace(const Point3& p) const;
  /// Samples the straight path at `samples` + 1 points; true when every
  /// sample is collision free and inside the workspace.
  bool path_clear(const Point3& from, const Point3& to, int samples) const;

  int count_contacts(const SimState& state) const;

  /// Minimal gap in l between two grasps.
  double min_grasp_gap(const RopeState& rope) const;

 private:
  struct Primitive;
  struct Pin;

  std::vector<Pin> make_pins(const SimState& state) const;
  void relax(RopeState& rope, const std::vector<Pin>& pins, double dt) const;
  void collide_rope(std::vector<Point3>& x, const std::vector<double>& w,
                    const RopeState& rope) const;
  Point3 push_gripper_out(const Point3& p) const;
  Point3 clamp_workspace(const Point3& p) const;
  void apply_tethers(SimState& state) const;

  std::shared_ptr<const WorldConfig> world_;
  std::shared_ptr<const std::vector<Primitive>> primitives_;
  SimParams params_;
};

}  // namespace glsig
