// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "glsig/grasp_graph.hpp"
#include "glsig/scenario_io.hpp"
#include "glsig/topology.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

using namespace glsig;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every trial of criteria 6-8, kept for the simulator check.
struct Runs {
  std::vector<std::pair<std::string, TrialResult>> trials;
  void add(const std::string& label, const TrialResult& r) {
    trials.emplace_back(label, r);
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string scenario_path(const std::string& name) {
  return std::string(GLSIG_SCENARIO_DIR) + "/" + name;
}

Outcome linking_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int checked = 0;
  int agree = 0;
  double worst = 0.0;
  while (checked < 200) {
    auto [a, b] = oracle::random_pair(rng);
    const double sep = oracle::clearance(a, b);
    if (sep < 0.05 * std::max(oracle::diameter(a), oracle::diameter(b))) {
      continue;
    }
    const int expected = std::abs(
        oracle::crossing_linking_number(a, b, oracle::random_rotation(rng)));
    const double raw = h_raw(a, b);
    worst = std::max(worst, std::abs(raw - std::round(raw)));
    agree += h_int(a, b) == expected;
    ++checked;
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = agree == 200 && worst < 0.02 && dt < 10.0;
  o.detail = std::to_string(agree) + "/200 agree, max |h_raw - round| " +
             fmt("%.2e", worst) + ", " + fmt("%.2f s", dt);
  return o;
}

Outcome hopf() {
  const auto t0 = Clock::now();
  const PolyLoop a = make_circle({0, 0, 0}, Vec3::UnitZ(), 1.0, 64);
  const PolyLoop b = make_circle({1, 0, 0}, Vec3::UnitY(), 1.0, 64);
  const double raw = h_raw(a, b);
  const int h = h_int(a, b);
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = h == 1 && std::abs(raw - 1.0) < 0.01 && dt < 1.0;
  o.detail = "h_int " + std::to_string(h) + ", h_raw " + fmt("%.6f", raw) +
             ", " + fmt("%.3f s", dt);
  return o;
}

Outcome fan_cycles() {
  const auto t0 = Clock::now();
  Outcome o;
  for (int n_a = 2; n_a <= 5; ++n_a) {
    SimState s;
    s.rope = scenes::rope_along({{0.2, -0.5, 0.3}, {0.2, 0.5, 0.3}}, 41);
    // The attach point is one participant; the rest are grasping grippers.
    for (int k = 1; k < n_a; ++k) {
      s.grippers.push_back(scenes::holding(s.rope, 0.15 * k));
    }
    const GraphFrame frame{Point3::Zero(), Attach{1.0, s.rope.points.back()}};
    const auto cycles = extract_gripper_cycles(build_graph(s, frame));
    const int got = static_cast<int>(cycles.size());
    o.pass = o.pass && got == n_a - 1;
    o.detail += "n_a=" + std::to_string(n_a) + ":" + std::to_string(got) + " ";
  }
  const double dt = seconds_since(t0);
  o.pass = o.pass && dt < 1.0;
  o.detail += fmt("%.3f s", dt);
  return o;
}

Outcome signature_timing() {
  // Two grippers, one attach point, three rings of 20 segments, 50 points.
  const auto f = scenes::fig3_scene(50, 20);
  std::vector<double> ms;
  GLSignature sig;
  for (int k = 0; k < 100; ++k) {
    const auto t0 = Clock::now();
    sig = compute_signature(f.state, f.world, 1.0);
    ms.push_back(1e3 * seconds_since(t0));
  }
  std::nth_element(ms.begin(), ms.begin() + 50, ms.end());
  const double median = ms[50];
  Outcome o;
  o.pass = median <= 10.0;
  o.detail = "median " + fmt("%.3f ms", median) + ", signature " +
             sig.to_string();
  return o;
}

Outcome redundant_removal() {
  const auto t0 = Clock::now();
  auto two = scenes::fig3_scene();
  two.state.grippers = {scenes::holding(two.state.rope, 0.2),
                        scenes::holding(two.state.rope, 0.3)};
  auto one = two;
  one.state.grippers = {scenes::holding(one.state.rope, 0.3)};
  const auto rep = analyze_signature(two.state, two.world.skeleton,
                                     frame_of(two.world), 1.0);
  const GLSignature single = compute_signature(one.state, one.world, 1.0);
  // The loop between the two grasps must really be unlinked.
  const GraspGraph g = build_graph(two.state, frame_of(two.world));
  bool zero_loop = false;
  for (const auto& c : extract_gripper_cycles(g)) {
    int grippers = 0;
    for (auto v : c) grippers += g.vertices[v].kind == VertexKind::Gripper;
    if (grippers != 2) continue;
    const auto h = h_vector(cycle_to_loop(g, c), two.world.skeleton);
    zero_loop = std::all_of(h.begin(), h.end(), [](int x) { return x == 0; });
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = zero_loop && rep.signature == single && dt < 1.0;
  o.detail = "two grippers " + rep.signature.to_string() + ", one gripper " +
             single.to_string() + (zero_loop ? "" : ", inter-gripper loop linked") +
             ", " + fmt("%.3f s", dt);
  return o;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

Outcome pulling(Runs& runs) {
  const auto t0 = Clock::now();
  const Scenario s = load_scenario_file(scenario_path("pulling.json"));
  int ok = 0;
  int monotone = 0;
  for (auto seed : s.seeds) {
    const TrialResult r = run_trial(s, seed);
    runs.add("pulling/" + std::to_string(seed), r);
    if (!r.success) continue;
    ++ok;
    monotone += strictly_decreasing(r.regrasp_geodesics);
  }
  const double dt = seconds_since(t0);
  const int n = static_cast<int>(s.seeds.size());
  Outcome o;
  o.pass = n == 25 && ok >= 20 && monotone == ok && dt < 600.0;
  o.detail = "success " + std::to_string(ok) + "/" + std::to_string(n) +
             ", geodesics strictly decreasing in " + std::to_string(monotone) +
             "/" + std::to_string(ok) + ", " + fmt("%.1f s", dt);
  return o;
}

// Signatures blocklisted at some iteration that show up again afterwards.
int recurrences(const TrialResult& r) {
  int bad = 0;
  for (std::size_t e = 0; e < r.events.size(); ++e) {
    const auto& ev = r.events[e];
    if (ev.kind != "blocklist") continue;
    const GLSignature sig = GLSignature::parse(ev.detail);
    for (const auto& [step, h] : r.signature_history) {
      if (step > ev.iteration && h == sig) ++bad;
    }
  }
  return bad;
}

Outcome blocklist_ring(Runs& runs) {
  const auto t0 = Clock::now();
  int reattempts_full = 0;
  int reattempts_nosig = 0;
  int recur = 0;
  int blocklisted = 0;
  for (const char* ablation : {"full", "no_signature"}) {
    const Scenario s = load_scenario_file(scenario_path("blocklist_ring.json"),
                                          {std::string("ablation=") + ablation});
    for (auto seed : s.seeds) {
      const TrialResult r = run_trial(s, seed);
      runs.add(std::string("blocklist_ring/") + ablation + "/" +
                   std::to_string(seed),
               r);
      if (std::string(ablation) == "full") {
        reattempts_full += r.reattempts;
        recur += recurrences(r);
        blocklisted += static_cast<int>(r.blocklist.size());
      } else {
        reattempts_nosig += r.reattempts;
      }
    }
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = recur == 0 && blocklisted > 0 &&
           reattempts_nosig >= reattempts_full + 1 && dt < 300.0;
  o.detail = "recurrences " + std::to_string(recur) + " after " +
             std::to_string(blocklisted) + " blocklistings, reattempts full " +
             std::to_string(reattempts_full) + " vs no_signature " +
             std::to_string(reattempts_nosig) + ", " + fmt("%.1f s", dt);
  return o;
}

Outcome threading_run(Runs& runs) {
  const auto t0 = Clock::now();
  const Scenario s = load_scenario_file(scenario_path("threading.json"));
  const auto& plan = std::get<ThreadingPlan>(s.task);
  Outcome o;
  int executed = 0;
  for (auto seed : s.seeds) {
    const TrialResult r = run_trial(s, seed);
    runs.add("threading/" + std::to_string(seed), r);
    // Subgoals are reached in order.
    std::size_t next = 0;
    bool order = true;
    for (const auto& ev : r.events) {
      if (ev.kind != "subgoal") continue;
      order = order && next < plan.subgoals.size() &&
              ev.detail == "reached " + plan.subgoals[next].loop &&
              GLSignature::parse(ev.signature) == plan.subgoals[next].signature;
      ++next;
    }
    order = order && next == plan.subgoals.size();
    // Every executed grasp change lands on the subgoal being worked on.
    bool changes_ok = true;
    std::size_t j = 0;
    for (const auto& ev : r.events) {
      if (ev.kind == "subgoal") ++j;
      if (ev.kind == "deviation") changes_ok = false;
      if (ev.kind == "regrasp" && j < plan.subgoals.size()) {
        ++executed;
        changes_ok = changes_ok && GLSignature::parse(ev.signature) ==
                                       plan.subgoals[j].signature;
      }
    }
    const bool once = r.penetrations == std::vector<int>(plan.subgoals.size(), 1);
    o.pass = o.pass && order && changes_ok && once;
    std::string pen;
    for (int p : r.penetrations) {
      pen += (pen.empty() ? "" : ",") + std::to_string(p);
    }
    o.detail += "seed " + std::to_string(seed) + ": order " +
                (order ? "ok" : "wrong") + ", penetrations " + pen +
                ", final goal " + (r.success ? "reached" : "missed") + "; ";
  }
  const double dt = seconds_since(t0);
  o.pass = o.pass && dt < 300.0;
  o.detail += std::to_string(executed) + " grasp changes during subgoals, " +
              fmt("%.1f s", dt);
  return o;
}

Outcome determinism(const Runs& runs) {
  // Re-run the first trial of each scenario and compare everything but the
  // wall time.
  const std::map<std::string, std::pair<std::string, std::vector<std::string>>>
      reruns = {
          {"pulling/", {"pulling.json", {}}},
          {"blocklist_ring/full/", {"blocklist_ring.json", {"ablation=full"}}},
          {"threading/", {"threading.json", {}}},
      };
  Outcome o;
  int compared = 0;
  for (const auto& [prefix, file] : reruns) {
    const Scenario s = load_scenario_file(scenario_path(file.first), file.second);
    const auto seed = s.seeds.front();
    const std::string label = prefix + std::to_string(seed);
    const auto it = std::find_if(runs.trials.begin(), runs.trials.end(),
                                 [&](const auto& t) { return t.first == label; });
    if (it == runs.trials.end()) {
      o.pass = false;
      o.detail += label + " missing; ";
      continue;
    }
    TrialResult a = it->second;
    TrialResult b = run_trial(s, seed);
    a.wall_time = 0.0;
    b.wall_time = 0.0;
    const bool same = result_record(s, a) == result_record(s, b);
    o.pass = o.pass && same;
    ++compared;
    if (!same) o.detail += label + " differs; ";
  }
  o.detail += std::to_string(compared) + " trials re-run";
  return o;
}

Outcome simulator_invariants(const Runs& runs) {
  double strain = 0.0;
  double residual = 0.0;
  std::string worst_strain;
  std::string worst_residual;
  for (const auto& [label, r] : runs.trials) {
    if (r.max_strain > strain) {
      strain = r.max_strain;
      worst_strain = label;
    }
    if (r.max_residual > residual) {
      residual = r.max_residual;
      worst_residual = label;
    }
  }
  Outcome o;
  o.pass = !runs.trials.empty() && strain <= 0.05 && residual < 1e-3;
  o.detail = std::to_string(runs.trials.size()) + " trials, max strain " +
             fmt("%.4f", strain) + (worst_strain.empty() ? "" : " (" + worst_strain + ")") +
             ", max residual " + fmt("%.2e m", residual) +
             (worst_residual.empty() ? "" : " (" + worst_residual + ")");
  return o;
}

}  // namespace

int main() {
  Runs runs;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"linking integral vs crossing oracle", linking_oracle},
      {"Hopf link", hopf},
      {"fan graph cycle count", fan_cycles},
      {"signature timing", signature_timing},
      {"redundant gripper removal", redundant_removal},
      {"pulling", [&] { return pulling(runs); }},
      {"blocklist ring", [&] { return blocklist_ring(runs); }},
      {"threading subgoals", [&] { return threading_run(runs); }},
      {"determinism", [&] { return determinism(runs); }},
      {"simulator invariants", [&] { return simulator_invariants(runs); }},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", k, name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
