#include "glsig/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "glsig/errors.hpp"

namespace glsig {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw ValidationError(path + ": " + why);
}

void allow_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) invalid(path + "." + it.key(), "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(path, "must be finite");
  return x;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) invalid(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "expected a string");
  return v.get<std::string>();
}

Point3 as_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) invalid(path, "expected [x, y, z]");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
          as_number(v[2], path + "[2]")};
}

std::vector<Point3> as_points(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected a list of points");
  std::vector<Point3> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_point(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Optional-field readers: leave `out` untouched when the key is absent.
void read(const json& obj, const char* key, const std::string& path,
          double& out) {
  if (obj.contains(key)) out = as_number(obj.at(key), join(path, key));
}
void read(const json& obj, const char* key, const std::string& path, int& out) {
  if (obj.contains(key)) out = as_int(obj.at(key), join(path, key));
}

json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

json points_json(const std::vector<Point3>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

std::vector<Point3> resample(const std::vector<Point3>& way, int n,
                             const std::string& path) {
  if (way.size() < 2) invalid(path, "need at least 2 waypoints");
  if (n < 10) invalid(path, "num_points must be >= 10");
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < way.size(); ++i) {
    cum.push_back(cum.back() + (way[i] - way[i - 1]).norm());
  }
  const double total = cum.back();
  if (!(total > 0.0)) invalid(path, "waypoints have zero length");
  std::vector<Point3> out;
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double s = total * k / (n - 1);
    while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(way[seg] + t * (way[seg + 1] - way[seg]));
  }
  return out;
}

double mean_segment(const std::vector<Point3>& pts) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    sum += (pts[i + 1] - pts[i]).norm();
  }
  return sum / static_cast<double>(pts.size() - 1);
}

Obstacle read_obstacle(const json& o, const std::string& path) {
  const std::string type = o.contains("type")
                               ? as_string(o.at("type"), path + ".type")
                               : std::string();
  if (type == "box") {
    allow_keys(o, path, {"type", "min", "max"});
    Box b{as_point(o.at("min"), path + ".min"),
          as_point(o.at("max"), path + ".max")};
    if (((b.hi - b.lo).array() <= 0.0).any()) invalid(path, "box min >= max");
    return b;
  }
  if (type == "capsule") {
    allow_keys(o, path, {"type", "a", "b", "radius"});
    Capsule c{as_point(o.at("a"), path + ".a"), as_point(o.at("b"), path + ".b"),
              as_number(o.at("radius"), path + ".radius")};
    if (c.radius < 0.0) invalid(path + ".radius", "must be >= 0");
    return c;
  }
  invalid(path + ".type", "expected \"box\" or \"capsule\"");
}

NamedLoop read_loop(const json& o, const std::string& path) {
  allow_keys(o, path, {"name", "points", "circle", "wire_radius"});
  NamedLoop nl;
  nl.name = as_string(o.at("name"), path + ".name");
  if (o.contains("wire_radius")) {
    nl.wire_radius = as_number(o.at("wire_radius"), path + ".wire_radius");
  }
  try {
    if (o.contains("points")) {
      nl.loop = PolyLoop(as_points(o.at("points"), path + ".points"));
    } else if (o.contains("circle")) {
      const json& c = o.at("circle");
      const std::string cp = path + ".circle";
      allow_keys(c, cp, {"center", "normal", "radius", "segments"});
      int segs = 16;
      read(c, "segments", cp, segs);
      if (segs < 3) invalid(cp + ".segments", "must be >= 3");
      const Vec3 normal = as_point(c.at("normal"), cp + ".normal");
      if (normal.norm() == 0.0) invalid(cp + ".normal", "must be non-zero");
      nl.loop = make_circle(as_point(c.at("center"), cp + ".center"), normal,
                            as_number(c.at("radius"), cp + ".radius"),
                            static_cast<std::size_t>(segs));
    } else {
      invalid(path, "needs \"points\" or \"circle\"");
    }
  } catch (const InvalidGeometry& e) {
    invalid(path, e.what());
  }
  return nl;
}

PointGoal read_point_goal(const json& o, const std::string& path,
                          bool with_type) {
  if (with_type) {
    allow_keys(o, path, {"type", "goal", "radius", "keypoint"});
  } else {
    allow_keys(o, path, {"goal", "radius", "keypoint"});
  }
  PointGoal g;
  g.goal_p = as_point(o.at("goal"), path + ".goal");
  read(o, "radius", path, g.goal_d);
  read(o, "keypoint", path, g.l_k);
  if (!(g.goal_d > 0.0)) invalid(path + ".radius", "must be > 0");
  if (!(g.l_k >= 0.0 && g.l_k <= 1.0)) invalid(path + ".keypoint", "must be in [0,1]");
  return g;
}

json& at_path(json& doc, const std::string& dotted) {
  json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ValidationError("override key '" + dotted + "' is malformed");
    if (cur->is_null()) *cur = json::object();
    if (!cur->is_object()) {
      throw ValidationError("override key '" + dotted + "' descends into a non-object");
    }
    cur = &(*cur)[key];
    if (dot == std::string::npos) return *cur;
    start = dot + 1;
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json parsed = json::parse(value, nullptr, false);
  at_path(doc, key) = parsed.is_discarded() ? json(value) : parsed;
}

std::string line_col(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void validate_threading(const Scenario& s, const ThreadingPlan& plan) {
  const std::size_t loops = s.world.skeleton.size();
  if (!s.world.attach) invalid("task", "threading needs an attached rope end");
  int prev_sum = 0;
  for (std::size_t j = 0; j < plan.subgoals.size(); ++j) {
    const auto& sg = plan.subgoals[j];
    const std::string path = "task.subgoals[" + std::to_string(j) + "]";
    if (!s.world.skeleton.find(sg.loop)) {
      invalid(path + ".loop", "unknown skeleton loop '" + sg.loop + "'");
    }
    if (sg.direction != 1 && sg.direction != -1) {
      invalid(path + ".direction", "must be +1 or -1");
    }
    int sum = 0;
    for (const auto& v : sg.signature.entries()) {
      if (v.size() != loops) {
        invalid(path + ".signature",
                "vectors must have one entry per skeleton loop");
      }
      for (int x : v) sum += x;
    }
    if (sum != prev_sum + 1) {
      invalid(path + ".signature",
              "must add exactly one linking to the previous subgoal");
    }
    prev_sum = sum;
  }
}

Scenario from_json(const json& doc) {
  allow_keys(doc, "scenario",
             {"name", "units", "world", "rope", "grippers", "task", "sim",
              "mppi", "weights", "planner", "trap", "threading", "i_max",
              "ablation", "seeds"});
  Scenario s;
  s.name = doc.contains("name") ? as_string(doc.at("name"), "name") : "unnamed";
  if (doc.contains("units")) {
    const json& u = doc.at("units");
    allow_keys(u, "units", {"length", "time"});
    if (u.value("length", "m") != "m" || u.value("time", "s") != "s") {
      invalid("units", "only meters and seconds are supported");
    }
  }

  // world
  if (!doc.contains("world")) invalid("world", "missing");
  const json& w = doc.at("world");
  allow_keys(w, "world", {"base", "gravity", "floor_z", "reach", "obstacles",
                          "skeleton", "attach"});
  if (w.contains("base")) s.world.base = as_point(w.at("base"), "world.base");
  if (w.contains("gravity")) {
    s.world.gravity = as_point(w.at("gravity"), "world.gravity");
  }
  if (w.contains("floor_z") && !w.at("floor_z").is_null()) {
    s.world.floor_z = as_number(w.at("floor_z"), "world.floor_z");
  }
  if (w.contains("reach") && !w.at("reach").is_null()) {
    s.world.reach = as_number(w.at("reach"), "world.reach");
    if (!(s.world.reach > 0.0)) invalid("world.reach", "must be > 0");
  }
  if (w.contains("obstacles")) {
    const json& obs = w.at("obstacles");
    if (!obs.is_array()) invalid("world.obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      s.world.obstacles.push_back(
          read_obstacle(obs[i], "world.obstacles[" + std::to_string(i) + "]"));
    }
  }
  if (w.contains("skeleton")) {
    const json& sk = w.at("skeleton");
    if (!sk.is_array()) invalid("world.skeleton", "expected a list");
    std::vector<NamedLoop> loops;
    for (std::size_t i = 0; i < sk.size(); ++i) {
      loops.push_back(read_loop(sk[i], "world.skeleton[" + std::to_string(i) + "]"));
    }
    try {
      s.world.skeleton = Skeleton(std::move(loops));
    } catch (const InvalidGeometry& e) {
      invalid("world.skeleton", e.what());
    }
  }

  // rope
  if (!doc.contains("rope")) invalid("rope", "missing");
  const json& r = doc.at("rope");
  allow_keys(r, "rope", {"points", "waypoints", "num_points", "perturbation"});
  if (r.contains("points")) {
    s.rope_init = as_points(r.at("points"), "rope.points");
  } else if (r.contains("waypoints")) {
    int n = 50;
    read(r, "num_points", "rope", n);
    s.rope_init = resample(as_points(r.at("waypoints"), "rope.waypoints"), n,
                           "rope.waypoints");
  } else {
    invalid("rope", "needs \"points\" or \"waypoints\"");
  }
  read(r, "perturbation", "rope", s.perturbation);
  if (s.perturbation < 0.0) invalid("rope.perturbation", "must be >= 0");
  if (s.rope_init.size() < 10) invalid("rope", "needs at least 10 points");
  const double mean = mean_segment(s.rope_init);
  if (!(mean > 0.0)) invalid("rope", "zero-length rope");
  for (std::size_t i = 0; i + 1 < s.rope_init.size(); ++i) {
    const double len = (s.rope_init[i + 1] - s.rope_init[i]).norm();
    if (std::abs(len / mean - 1.0) > 0.01) {
      invalid("rope", "segment " + std::to_string(i) +
                          " deviates more than 1% from the mean length");
    }
  }

  if (w.contains("attach") && !w.at("attach").is_null()) {
    const json& a = w.at("attach");
    allow_keys(a, "world.attach", {"loc", "point"});
    Attach at;
    read(a, "loc", "world.attach", at.loc);
    if (at.loc != 0.0 && at.loc != 1.0) {
      invalid("world.attach.loc", "must be 0 or 1 (a rope end)");
    }
    at.point = a.contains("point")
                   ? as_point(a.at("point"), "world.attach.point")
                   : (at.loc == 0.0 ? s.rope_init.front() : s.rope_init.back());
    s.world.attach = at;
  }

  // sim
  if (doc.contains("sim")) {
    const json& p = doc.at("sim");
    allow_keys(p, "sim", {"dt", "iterations", "newton_iterations",
                          "max_drift", "grasp_radius", "v_max",
                          "gripper_radius", "rope_radius",
                          "min_grasp_gap_segments", "contact_tolerance",
                          "max_strain", "settle_steps", "grasp_settle_steps"});
    read(p, "dt", "sim", s.sim.dt);
    read(p, "iterations", "sim", s.sim.iterations);
    read(p, "newton_iterations", "sim", s.sim.newton_iterations);
    read(p, "max_drift", "sim", s.sim.max_drift);
    read(p, "grasp_radius", "sim", s.sim.grasp_radius);
    read(p, "v_max", "sim", s.sim.v_max);
    read(p, "gripper_radius", "sim", s.sim.gripper_radius);
    read(p, "rope_radius", "sim", s.sim.rope_radius);
    read(p, "min_grasp_gap_segments", "sim", s.sim.min_grasp_gap_segments);
    read(p, "contact_tolerance", "sim", s.sim.contact_tolerance);
    read(p, "max_strain", "sim", s.sim.max_strain);
    read(p, "settle_steps", "sim", s.sim.settle_steps);
    read(p, "grasp_settle_steps", "sim", s.sim.grasp_settle_steps);
  }
  if (!(s.sim.dt > 0.0)) invalid("sim.dt", "must be > 0");
  if (s.sim.iterations < 1) invalid("sim.iterations", "must be >= 1");
  if (!(s.sim.max_drift > 0.0)) invalid("sim.max_drift", "must be > 0");
  if (s.sim.newton_iterations < 0) {
    invalid("sim.newton_iterations", "must be >= 0");
  }
  if (!(s.sim.v_max > 0.0)) invalid("sim.v_max", "must be > 0");

  // grippers
  if (!doc.contains("grippers") || !doc.at("grippers").is_array() ||
      doc.at("grippers").empty()) {
    invalid("grippers", "expected a non-empty list");
  }
  const json& gs = doc.at("grippers");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const std::string path = "grippers[" + std::to_string(i) + "]";
    allow_keys(gs[i], path, {"position", "grasp_loc"});
    GripperState g;
    if (gs[i].contains("grasp_loc") && !gs[i].at("grasp_loc").is_null()) {
      g.grasping = true;
      g.grasp_loc = as_number(gs[i].at("grasp_loc"), path + ".grasp_loc");
      if (!(g.grasp_loc >= 0.0 && g.grasp_loc <= 1.0)) {
        invalid(path + ".grasp_loc", "must be in [0,1]");
      }
    }
    if (gs[i].contains("position")) {
      g.position = as_point(gs[i].at("position"), path + ".position");
    } else if (!g.grasping) {
      invalid(path + ".position", "required for a free gripper");
    }
    s.grippers_init.push_back(g);
  }

  // control parameters
  auto& tp = s.params;
  tp.mppi.dt = s.sim.dt;
  if (doc.contains("mppi")) {
    const json& m = doc.at("mppi");
    allow_keys(m, "mppi", {"horizon", "samples", "noise_sigma", "temperature", "dt"});
    read(m, "horizon", "mppi", tp.mppi.horizon);
    read(m, "samples", "mppi", tp.mppi.samples);
    read(m, "noise_sigma", "mppi", tp.mppi.noise_sigma);
    read(m, "temperature", "mppi", tp.mppi.temperature);
    read(m, "dt", "mppi", tp.mppi.dt);
  }
  validate(tp.mppi);
  if (doc.contains("weights")) {
    const json& c = doc.at("weights");
    allow_keys(c, "weights", {"alpha1", "alpha2", "alpha3", "beta1"});
    read(c, "alpha1", "weights", tp.weights.alpha1);
    read(c, "alpha2", "weights", tp.weights.alpha2);
    read(c, "alpha3", "weights", tp.weights.alpha3);
    read(c, "beta1", "weights", tp.weights.beta1);
  }
  for (double x : {tp.weights.alpha1, tp.weights.alpha2, tp.weights.alpha3,
                   tp.weights.beta1}) {
    if (x < 0.0) invalid("weights", "must be non-negative");
  }
  if (doc.contains("planner")) {
    const json& p = doc.at("planner");
    allow_keys(p, "planner", {"n_x", "penalty", "delta_s_cap",
                              "resample_attempts", "path_samples", "mode"});
    read(p, "n_x", "planner", tp.planner.n_x);
    read(p, "penalty", "planner", tp.planner.penalty);
    read(p, "delta_s_cap", "planner", tp.planner.delta_s_cap);
    read(p, "resample_attempts", "planner", tp.planner.resample_attempts);
    read(p, "path_samples", "planner", tp.planner.path_samples);
    if (p.contains("mode")) {
      const std::string mode = as_string(p.at("mode"), "planner.mode");
      if (mode == "full") {
        tp.planner.mode = PlannerMode::Full;
      } else if (mode == "alternating") {
        tp.planner.mode = PlannerMode::Alternating;
      } else {
        invalid("planner.mode", "expected \"full\" or \"alternating\"");
      }
    }
  }
  if (tp.planner.n_x < 1) invalid("planner.n_x", "must be >= 1");
  if (doc.contains("trap")) {
    const json& t = doc.at("trap");
    allow_keys(t, "trap", {"window", "theta"});
    read(t, "window", "trap", tp.trap_window);
    read(t, "theta", "trap", tp.trap_theta);
  }
  if (tp.trap_window < 2) invalid("trap.window", "must be >= 2");
  if (doc.contains("threading")) {
    const json& t = doc.at("threading");
    allow_keys(t, "threading", {"w_mag", "subgoal_offset", "trap_backoff"});
    read(t, "w_mag", "threading", tp.w_mag);
    read(t, "subgoal_offset", "threading", tp.subgoal_offset);
    read(t, "trap_backoff", "threading", tp.trap_backoff);
  }
  read(doc, "i_max", "", tp.i_max);
  if (tp.i_max < 0) invalid("i_max", "must be >= 0");
  if (doc.contains("ablation")) {
    try {
      tp.ablation = Ablation::parse(as_string(doc.at("ablation"), "ablation"));
    } catch (const ParseError& e) {
      invalid("ablation", e.what());
    }
  }

  // task
  if (!doc.contains("task")) invalid("task", "missing");
  const json& t = doc.at("task");
  const std::string type =
      t.contains("type") ? as_string(t.at("type"), "task.type") : std::string();
  if (type == "point_reaching") {
    s.task = read_point_goal(t, "task", true);
  } else if (type == "threading") {
    allow_keys(t, "task", {"type", "subgoals", "final"});
    ThreadingPlan plan;
    const json& sgs = t.at("subgoals");
    if (!sgs.is_array() || sgs.empty()) {
      invalid("task.subgoals", "expected a non-empty list");
    }
    for (std::size_t j = 0; j < sgs.size(); ++j) {
      const std::string path = "task.subgoals[" + std::to_string(j) + "]";
      allow_keys(sgs[j], path, {"loop", "direction", "signature"});
      Subgoal sg;
      sg.loop = as_string(sgs[j].at("loop"), path + ".loop");
      if (sgs[j].contains("direction")) {
        sg.direction = as_int(sgs[j].at("direction"), path + ".direction");
      }
      try {
        sg.signature = GLSignature::parse(
            as_string(sgs[j].at("signature"), path + ".signature"));
      } catch (const ParseError& e) {
        invalid(path + ".signature", e.what());
      }
      plan.subgoals.push_back(sg);
    }
    plan.final = read_point_goal(t.at("final"), "task.final", false);
    s.task = plan;
    validate_threading(s, plan);
  } else {
    invalid("task.type", "expected \"point_reaching\" or \"threading\"");
  }

  // seeds
  if (doc.contains("seeds")) {
    const json& sd = doc.at("seeds");
    if (sd.is_array()) {
      for (std::size_t i = 0; i < sd.size(); ++i) {
        const std::string path = "seeds[" + std::to_string(i) + "]";
        if (!sd[i].is_number_unsigned()) invalid(path, "expected a non-negative integer");
        s.seeds.push_back(sd[i].get<std::uint64_t>());
      }
    } else if (sd.is_object()) {
      allow_keys(sd, "seeds", {"start", "count"});
      int start = 0;
      int count = 1;
      read(sd, "start", "seeds", start);
      read(sd, "count", "seeds", count);
      if (start < 0 || count < 0) invalid("seeds", "must be non-negative");
      for (int i = 0; i < count; ++i) s.seeds.push_back(static_cast<std::uint64_t>(start + i));
    } else {
      invalid("seeds", "expected a list or {start, count}");
    }
  }
  if (s.seeds.empty()) s.seeds.push_back(0);
  return s;
}

json obstacle_json(const Obstacle& o) {
  if (const auto* b = std::get_if<Box>(&o)) {
    return {{"type", "box"}, {"min", point_json(b->lo)}, {"max", point_json(b->hi)}};
  }
  const auto& c = std::get<Capsule>(o);
  return {{"type", "capsule"},
          {"a", point_json(c.a)},
          {"b", point_json(c.b)},
          {"radius", c.radius}};
}

json point_goal_json(const PointGoal& g) {
  return {{"goal", point_json(g.goal_p)}, {"radius", g.goal_d}, {"keypoint", g.l_k}};
}

json params_json(const Scenario& s) {
  const auto& tp = s.params;
  json out;
  out["sim"] = {{"dt", s.sim.dt},
                {"iterations", s.sim.iterations},
                {"newton_iterations", s.sim.newton_iterations},
                {"max_drift", s.sim.max_drift},
                {"grasp_radius", s.sim.grasp_radius},
                {"v_max", s.sim.v_max},
                {"gripper_radius", s.sim.gripper_radius},
                {"rope_radius", s.sim.rope_radius},
                {"min_grasp_gap_segments", s.sim.min_grasp_gap_segments},
                {"contact_tolerance", s.sim.contact_tolerance},
                {"max_strain", s.sim.max_strain},
                {"settle_steps", s.sim.settle_steps},
                {"grasp_settle_steps", s.sim.grasp_settle_steps}};
  out["mppi"] = {{"horizon", tp.mppi.horizon},
                 {"samples", tp.mppi.samples},
                 {"noise_sigma", tp.mppi.noise_sigma},
                 {"temperature", tp.mppi.temperature},
                 {"dt", tp.mppi.dt}};
  out["weights"] = {{"alpha1", tp.weights.alpha1},
                    {"alpha2", tp.weights.alpha2},
                    {"alpha3", tp.weights.alpha3},
                    {"beta1", tp.weights.beta1}};
  out["planner"] = {{"n_x", tp.planner.n_x},
                    {"penalty", tp.planner.penalty},
                    {"delta_s_cap", tp.planner.delta_s_cap},
                    {"resample_attempts", tp.planner.resample_attempts},
                    {"path_samples", tp.planner.path_samples},
                    {"mode", to_string(tp.planner.mode)}};
  out["trap"] = {{"window", tp.trap_window}, {"theta", tp.trap_theta}};
  out["threading"] = {{"w_mag", tp.w_mag},
                      {"subgoal_offset", tp.subgoal_offset},
                      {"trap_backoff", tp.trap_backoff}};
  out["i_max"] = tp.i_max;
  out["ablation"] = tp.ablation.to_string();
  return out;
}

json scenario_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["units"] = {{"length", "m"}, {"time", "s"}};
  json w;
  w["base"] = point_json(s.world.base);
  w["gravity"] = point_json(s.world.gravity);
  w["floor_z"] = s.world.floor_z ? json(*s.world.floor_z) : json(nullptr);
  w["reach"] = std::isfinite(s.world.reach) ? json(s.world.reach) : json(nullptr);
  w["obstacles"] = json::array();
  for (const auto& o : s.world.obstacles) w["obstacles"].push_back(obstacle_json(o));
  w["skeleton"] = json::array();
  for (const auto& l : s.world.skeleton.loops()) {
    w["skeleton"].push_back({{"name", l.name},
                             {"points", points_json(l.loop.points())},
                             {"wire_radius", l.wire_radius}});
  }
  w["attach"] = s.world.attach
                    ? json{{"loc", s.world.attach->loc},
                           {"point", point_json(s.world.attach->point)}}
                    : json(nullptr);
  doc["world"] = w;
  doc["rope"] = {{"points", points_json(s.rope_init)},
                 {"perturbation", s.perturbation}};
  doc["grippers"] = json::array();
  for (const auto& g : s.grippers_init) {
    json gj = {{"position", point_json(g.position)}};
    gj["grasp_loc"] = g.grasping ? json(g.grasp_loc) : json(nullptr);
    doc["grippers"].push_back(gj);
  }
  if (const auto* pg = std::get_if<PointGoal>(&s.task)) {
    json t = point_goal_json(*pg);
    t["type"] = "point_reaching";
    doc["task"] = t;
  } else {
    const auto& plan = std::get<ThreadingPlan>(s.task);
    json t = {{"type", "threading"}, {"final", point_goal_json(plan.final)}};
    t["subgoals"] = json::array();
    for (const auto& sg : plan.subgoals) {
      t["subgoals"].push_back({{"loop", sg.loop},
                               {"direction", sg.direction},
                               {"signature", sg.signature.to_string()}});
    }
    doc["task"] = t;
  }
  const json params = params_json(s);
  for (const auto& [k, v] : params.items()) doc[k] = v;
  doc["seeds"] = s.seeds;
  return doc;
}

}  // namespace

Scenario load_scenario(const std::string& text,
                       const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario JSON, " + line_col(text, e.byte) + ": " +
                     e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    // Missing required members surface as out_of_range from at().
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), overrides);
}

std::string serialize_scenario(const Scenario& s) {
  return scenario_json(s).dump(2);
}

std::string resolved_parameters(const Scenario& s) {
  return params_json(s).dump();
}

RopeSimulator make_simulator(const Scenario& s) {
  return RopeSimulator(s.world, s.sim);
}

SimState raw_state(const Scenario& s) {
  SimState st;
  st.rope.points = s.rope_init;
  st.rope.rest_len = mean_segment(s.rope_init);
  st.grippers = s.grippers_init;
  for (auto& g : st.grippers) {
    if (g.grasping) g.position = p_of_l(st.rope, g.grasp_loc);
  }
  return st;
}

SimState initial_state(const Scenario& s, const RopeSimulator& sim,
                       std::uint64_t seed) {
  SimState st = raw_state(s);
  if (s.perturbation > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    constexpr int kModes = 3;
    double a[kModes][2];
    for (auto& m : a) {
      m[0] = coef(rng);
      m[1] = coef(rng);
    }
    const std::size_t n = st.rope.points.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(n - 1);
      for (int k = 0; k < kModes; ++k) {
        const double b = std::sin((k + 1) * std::numbers::pi * u) / (k + 1);
        st.rope.points[j].x() += s.perturbation * a[k][0] * b;
        st.rope.points[j].y() += s.perturbation * a[k][1] * b;
      }
    }
    // Follow-the-leader pass from the attached end restores the rest length
    // of every segment.
    auto& pts = st.rope.points;
    const bool from_back = s.world.attach && s.world.attach->loc == 1.0;
    if (from_back) std::reverse(pts.begin(), pts.end());
    for (std::size_t j = 1; j < n; ++j) {
      const Vec3 d = pts[j] - pts[j - 1];
      if (d.norm() > 0.0) pts[j] = pts[j - 1] + st.rope.rest_len * d.normalized();
    }
    if (from_back) std::reverse(pts.begin(), pts.end());
    for (auto& g : st.grippers) {
      if (g.grasping) g.position = p_of_l(st.rope, g.grasp_loc);
    }
  }
  return sim.settle(st, s.sim.settle_steps);
}

TrialResult run_trial(const Scenario& s, std::uint64_t seed) {
  const RopeSimulator sim = make_simulator(s);
  const SimState start = initial_state(s, sim, seed);
  if (const auto* pg = std::get_if<PointGoal>(&s.task)) {
    return point_reaching(sim, start, *pg, s.params, seed);
  }
  return threading(sim, start, std::get<ThreadingPlan>(s.task), s.params, seed);
}

std::string result_record(const Scenario& s, const TrialResult& r) {
  if (r.signature_history.empty()) {
    throw ValidationError("trial result has an empty signature history");
  }
  json j;
  j["scenario"] = s.name;
  j["seed"] = r.seed;
  j["ablation"] = s.params.ablation.to_string();
  j["success"] = r.success;
  j["iterations"] = r.iterations;
  j["regrasps"] = r.regrasps;
  j["wall_time"] = r.wall_time;
  j["sim_time"] = r.sim_time;
  j["final_distance"] = r.final_distance;
  j["max_strain"] = r.max_strain;
  j["max_residual"] = r.max_residual;
  j["reattempts"] = r.reattempts;
  j["penetrations"] = r.penetrations;
  j["regrasp_geodesics"] = r.regrasp_geodesics;
  json hist = json::array();
  for (const auto& [step, sig] : r.signature_history) {
    hist.push_back({{"step", step}, {"signature", sig.to_string()}});
  }
  j["signature_history"] = hist;
  json bl = json::array();
  for (const auto& sig : r.blocklist) bl.push_back(sig.to_string());
  j["blocklist"] = bl;
  json ev = json::array();
  for (const auto& e : r.events) {
    ev.push_back({{"iteration", e.iteration},
                  {"kind", e.kind},
                  {"detail", e.detail},
                  {"signature", e.signature},
                  {"geodesic", std::isfinite(e.geodesic) ? json(e.geodesic)
                                                          : json(nullptr)}});
  }
  j["events"] = ev;
  j["params"] = params_json(s);
  return j.dump();
}

void write_result(std::ostream& out, const Scenario& s, const TrialResult& r) {
  out << result_record(s, r) << '\n';
  out.flush();
  if (!out) throw Error("failed to write result record");
}

TrialResult parse_result_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("result record: ") + e.what());
  }
  try {
    TrialResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.success = j.at("success").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.regrasps = j.at("regrasps").get<int>();
    r.wall_time = j.at("wall_time").get<double>();
    r.sim_time = j.at("sim_time").get<double>();
    r.final_distance = j.at("final_distance").get<double>();
    r.max_strain = j.at("max_strain").get<double>();
    r.max_residual = j.at("max_residual").get<double>();
    r.reattempts = j.at("reattempts").get<int>();
    r.penetrations = j.at("penetrations").get<std::vector<int>>();
    r.regrasp_geodesics = j.at("regrasp_geodesics").get<std::vector<double>>();
    for (const auto& h : j.at("signature_history")) {
      r.signature_history.emplace_back(
          h.at("step").get<int>(),
          GLSignature::parse(h.at("signature").get<std::string>()));
    }
    for (const auto& b : j.at("blocklist")) {
      r.blocklist.push_back(GLSignature::parse(b.get<std::string>()));
    }
    for (const auto& e : j.at("events")) {
      TrialEvent ev;
      ev.iteration = e.at("iteration").get<int>();
      ev.kind = e.at("kind").get<std::string>();
      ev.detail = e.at("detail").get<std::string>();
      ev.signature = e.at("signature").get<std::string>();
      ev.geodesic = e.at("geodesic").is_null()
                        ? std::numeric_limits<double>::infinity()
                        : e.at("geodesic").get<double>();
      r.events.push_back(ev);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("result record: ") + e.what());
  }
}

}  // namespace glsig
