#pragma once

#include <array>
#include <optional>
#include <vector>

#include "glsig/geometry.hpp"
#include "glsig/rope_sim.hpp"
#include "glsig/signature.hpp"

namespace glsig {

enum class VertexKind { Base, Gripper, Attach };

struct GraspVertex {
  VertexKind kind = VertexKind::Base;
  int index = 0;     ///< gripper index, or attach index
  Point3 anchor = Point3::Zero();
  double loc = 0.0;  ///< rope location; unused for Base
};

struct GraspEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  PolyLine path;  ///< runs from vertices[a].anchor to vertices[b].anchor
};

/// Vertex 0 is always the base. Participants follow in rope order.
struct GraspGraph {
  std::vector<GraspVertex> vertices;
  std::vector<GraspEdge> edges;

  const GraspEdge* find_edge(std::size_t u, std::size_t v) const;
  std::size_t gripper_count() const;
};

using Cycle = std::array<std::size_t, 3>;

/// Inputs of the graph that do not change with the state.
struct GraphFrame {
  Point3 base = Point3::Zero();
  std::optional<Attach> attach;
};

GraphFrame frame_of(const WorldConfig& world);

/// Builds the grasp-loop graph. `active` (if non-empty) masks grippers that
/// are ignored even though they grasp. Throws NoParticipants.
GraspGraph build_graph(const SimState& state, const GraphFrame& frame,
                       const std::vector<bool>& active = {});

/// All 3-cycles containing at least one gripper vertex, vertex ids ascending.
std::vector<Cycle> extract_gripper_cycles(const GraspGraph& g);

/// Concatenates the three edge paths of `cycle` into a closed loop. Throws
/// DisconnectedPaths when the paths do not chain.
PolyLoop cycle_to_loop(const GraspGraph& g, const Cycle& cycle);

/// Everything computed on the way to a signature; used by diagnostics.
struct SignatureReport {
  GraspGraph graph;  ///< final graph after removals
  std::vector<Cycle> cycles;
  std::vector<PolyLoop> loops;
  std::vector<std::vector<int>> h;
  std::vector<int> removed_grippers;
  GLSignature signature;
};

/// Signature with redundant-gripper removal. `keypoint` decides which gripper
/// of a zero two-gripper loop is dropped (the one farther away along the
/// rope; ties drop the higher index).
SignatureReport analyze_signature(const SimState& state, const Skeleton& skel,
                                  const GraphFrame& frame, double keypoint);

GLSignature compute_signature(const SimState& state, const Skeleton& skel,
                              const GraphFrame& frame, double keypoint = 1.0);
GLSignature compute_signature(const SimState& state, const WorldConfig& world,
                              double keypoint = 1.0);

}  // namespace glsig
