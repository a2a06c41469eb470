#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "glsig/rope_sim.hpp"
#include "glsig/tasks.hpp"

namespace glsig {

using TaskSpec = std::variant<PointGoal, ThreadingPlan>;

/// A fully resolved scenario. Every optional field of the file has been
/// replaced by its default.
struct Scenario {
  std::string name;
  WorldConfig world;
  SimParams sim;
  std::vector<Point3> rope_init;
  std::vector<GripperState> grippers_init;
  TaskSpec task;
  TaskParams params;
  /// Amplitude (m) of the seeded smooth perturbation of the initial rope.
  double perturbation = 0.0;
  std::vector<std::uint64_t> seeds;
};

/// Parses and validates a JSON scenario. `overrides` are `dotted.key=value`
/// assignments applied to the document before validation; values are read as
/// JSON when possible and as strings otherwise.
/// Throws ParseError (with line and column) or ValidationError (naming the
/// field).
Scenario load_scenario(const std::string& text,
                       const std::vector<std::string>& overrides = {});
Scenario load_scenario_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});

/// Canonical JSON text of a resolved scenario; load_scenario reads it back
/// unchanged.
std::string serialize_scenario(const Scenario& s);

/// Resolved parameter block (sim, mppi, weights, planner, task settings) as
/// JSON text, as logged with every result.
std::string resolved_parameters(const Scenario& s);

/// Initial state for one seed: perturbed rope, grippers pinned to their grasp
/// locations, settled by the simulator.
SimState initial_state(const Scenario& s, const RopeSimulator& sim,
                       std::uint64_t seed);

RopeSimulator make_simulator(const Scenario& s);

TrialResult run_trial(const Scenario& s, std::uint64_t seed);

/// One self-contained JSON line. Throws ValidationError when the trial has
/// an empty signature history.
std::string result_record(const Scenario& s, const TrialResult& r);
void write_result(std::ostream& out, const Scenario& s, const TrialResult& r);

/// Reads back the TrialResult part of a record.
TrialResult parse_result_record(const std::string& line);

/// The scenario's initial configuration as written: no perturbation, no
/// settling. Grasping grippers sit at their grasp points.
SimState raw_state(const Scenario& s);

}  // namespace glsig
