#include "support/scenes.hpp"

#include <algorithm>

namespace scenes {

glsig::RopeState rope_along(const std::vector<Point3>& way, int n) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < way.size(); ++i) {
    cum.push_back(cum.back() + (way[i] - way[i - 1]).norm());
  }
  glsig::RopeState rope;
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double s = cum.back() * k / (n - 1);
    while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
    const double t = std::clamp((s - cum[seg]) / (cum[seg + 1] - cum[seg]), 0.0, 1.0);
    rope.points.push_back(way[seg] + t * (way[seg + 1] - way[seg]));
  }
  rope.rest_len = cum.back() / (n - 1);
  return rope;
}

glsig::GripperState holding(const glsig::RopeState& rope, double l) {
  glsig::GripperState g;
  g.position = glsig::p_of_l(rope, l);
  g.grasping = true;
  g.grasp_loc = l;
  return g;
}

glsig::GripperState free_at(const Point3& p) {
  glsig::GripperState g;
  g.position = p;
  return g;
}

Fig3 fig3_scene(int rope_points, std::size_t ring_segments) {
  Fig3 f;
  const Point3 y = Point3::UnitY();
  f.world.skeleton = glsig::Skeleton({
      {"A", glsig::make_circle({0.8, -0.15, 0.3}, y, 0.1, ring_segments), 0.0},
      {"B", glsig::make_circle({0.8, 0.15, 0.3}, y, 0.1, ring_segments), 0.0},
      {"C", glsig::make_circle({0.3, 0.0, 0.8}, Point3::UnitZ(), 0.1,
                               ring_segments),
       0.0},
  });
  f.state.rope = rope_along({{0.5, -0.6, 0.3},
                             {0.5, -0.3, 0.3},
                             {0.8, -0.3, 0.3},
                             {0.8, 0.0, 0.3},
                             {0.8, 0.3, 0.3},
                             {0.5, 0.3, 0.3}},
                            rope_points);
  f.world.attach = glsig::Attach{1.0, f.state.rope.points.back()};
  f.state.grippers = {holding(f.state.rope, 0.2), holding(f.state.rope, 0.6)};
  return f;
}

}  // namespace scenes
