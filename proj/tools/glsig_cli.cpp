// glsig: run grasp-loop signature experiments and inspect scene signatures.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glsig/errors.hpp"
#include "glsig/grasp_graph.hpp"
#include "glsig/scenario_io.hpp"

namespace {

using glsig::Scenario;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      if (hi < lo) throw CLI::ValidationError("--seeds", "empty range " + item);
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else if (!item.empty()) {
      out.push_back(std::stoull(item));
    }
  }
  return out;
}

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(s.sd / static_cast<double>(v.size()));
  return s;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides,
            const std::vector<std::uint64_t>& seeds_flag,
            const std::string& ablation, const std::string& out_path) {
  std::vector<std::string> ov = overrides;
  if (!ablation.empty()) ov.push_back("ablation=\"" + ablation + "\"");
  Scenario sc = glsig::load_scenario_file(path, ov);
  if (!seeds_flag.empty()) sc.seeds = seeds_flag;

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::app);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return 1;
    }
  }
  std::cerr << "scenario " << sc.name << ", ablation "
            << sc.params.ablation.to_string() << ", " << sc.seeds.size()
            << " seed(s)\n";
  std::vector<double> iters, walls, sims, regrasps;
  int ok = 0;
  for (std::uint64_t seed : sc.seeds) {
    const glsig::TrialResult r = glsig::run_trial(sc, seed);
    if (file.is_open()) glsig::write_result(file, sc, r);
    ok += r.success ? 1 : 0;
    iters.push_back(r.iterations);
    walls.push_back(r.wall_time);
    sims.push_back(r.sim_time);
    regrasps.push_back(r.regrasps);
    std::cerr << "  seed " << seed << ": " << (r.success ? "success" : "failure")
              << ", " << r.iterations << " iterations, " << r.regrasps
              << " regrasps, " << std::fixed << std::setprecision(1)
              << r.wall_time << " s\n"
              << std::defaultfloat;
  }
  const Stats it = stats(iters), wt = stats(walls), st = stats(sims),
              rg = stats(regrasps);
  std::cout << std::fixed << std::setprecision(2);
  std::cout << "success " << ok << "/" << sc.seeds.size() << "\n";
  std::cout << "iterations " << it.mean << " +- " << it.sd << "\n";
  std::cout << "regrasps " << rg.mean << " +- " << rg.sd << "\n";
  std::cout << "wall_time_s " << wt.mean << " +- " << wt.sd << "\n";
  std::cout << "sim_time_s " << st.mean << " +- " << st.sd << "\n";
  return 0;
}

const char* kind_name(glsig::VertexKind k) {
  switch (k) {
    case glsig::VertexKind::Base:
      return "base";
    case glsig::VertexKind::Gripper:
      return "gripper";
    case glsig::VertexKind::Attach:
      return "attach";
  }
  return "?";
}

std::string vertex_label(const glsig::GraspVertex& v) {
  switch (v.kind) {
    case glsig::VertexKind::Base:
      return "b";
    case glsig::VertexKind::Gripper:
      return "g" + std::to_string(v.index + 1);
    case glsig::VertexKind::Attach:
      return "a" + std::to_string(v.index + 1);
  }
  return "?";
}

int cmd_signature(const std::string& path, const std::string& loops_path) {
  const Scenario sc = glsig::load_scenario_file(path);
  const glsig::SimState state = glsig::raw_state(sc);
  double l_k = 1.0;
  if (const auto* pg = std::get_if<glsig::PointGoal>(&sc.task)) l_k = pg->l_k;
  if (const auto* tp = std::get_if<glsig::ThreadingPlan>(&sc.task)) {
    l_k = tp->final.l_k;
  }
  const auto rep = glsig::analyze_signature(state, sc.world.skeleton,
                                            glsig::frame_of(sc.world), l_k);
  std::cout << std::setprecision(4);
  std::cout << "vertices:\n";
  for (const auto& v : rep.graph.vertices) {
    std::cout << "  " << vertex_label(v) << " " << kind_name(v.kind) << " at ("
              << v.anchor.x() << ", " << v.anchor.y() << ", " << v.anchor.z()
              << ")";
    if (v.kind != glsig::VertexKind::Base) std::cout << " l=" << v.loc;
    std::cout << "\n";
  }
  std::cout << "edges:\n";
  for (const auto& e : rep.graph.edges) {
    std::cout << "  (" << vertex_label(rep.graph.vertices[e.a]) << ","
              << vertex_label(rep.graph.vertices[e.b]) << ") "
              << e.path.size() << " points\n";
  }
  for (int g : rep.removed_grippers) {
    std::cout << "removed redundant gripper g" << g + 1 << "\n";
  }
  std::cout << "loops:\n";
  for (std::size_t k = 0; k < rep.cycles.size(); ++k) {
    std::cout << "  ";
    for (std::size_t v : rep.cycles[k]) {
      std::cout << vertex_label(rep.graph.vertices[v]) << " ";
    }
    std::cout << "h=[";
    for (std::size_t i = 0; i < rep.h[k].size(); ++i) {
      std::cout << (i ? "," : "") << rep.h[k][i];
    }
    std::cout << "]\n";
  }
  std::cout << "signature " << rep.signature.to_string() << "\n";

  if (!loops_path.empty()) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t k = 0; k < rep.loops.size(); ++k) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& p : rep.loops[k].points()) {
        pts.push_back({p.x(), p.y(), p.z()});
      }
      out.push_back({{"h", rep.h[k]}, {"points", pts}});
    }
    std::ofstream f(loops_path);
    if (!f) {
      std::cerr << "error: cannot open " << loops_path << "\n";
      return 1;
    }
    f << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp-loop signature planning for rope manipulation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the trials of a scenario");
  std::string scenario_path;
  std::vector<std::uint64_t> seed_flags;
  std::string seeds_text;
  std::string ablation;
  std::string out_path;
  std::vector<std::string> overrides;
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", seed_flags, "Run this seed (repeatable)");
  run->add_option("--seeds", seeds_text, "Seed list, e.g. 0-24 or 1,4,7");
  run->add_option("--ablation", ablation,
                  "full, no_signature, always_blocklist or rollout_scored:<H>");
  run->add_option("--out", out_path, "Append JSON-lines results to this file");
  run->add_option("--override", overrides, "key.path=value (repeatable)");

  auto* sig = app.add_subcommand("signature", "Print a scene's grasp-loop signature");
  std::string scene_path;
  std::string loops_path;
  sig->add_option("scene", scene_path, "Scenario JSON file")->required();
  sig->add_option("--loops", loops_path, "Write loop polylines as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (run->parsed()) {
      std::vector<std::uint64_t> seeds = seed_flags;
      if (!seeds_text.empty()) {
        const auto more = parse_seed_list(seeds_text);
        seeds.insert(seeds.end(), more.begin(), more.end());
      }
      return cmd_run(scenario_path, overrides, seeds, ablation, out_path);
    }
    return cmd_signature(scene_path, loops_path);
  } catch (const glsig::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
