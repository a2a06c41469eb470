#include "glsig/grasp_graph.hpp"

#include <algorithm>
#include <cmath>

#include "glsig/errors.hpp"
#include "glsig/topology.hpp"

namespace glsig {

namespace {

constexpr double kJoinTol = 1e-6;
constexpr double kDupTol = 1e-9;

void push_unique(std::vector<Point3>& pts, const Point3& p) {
  if (pts.empty() || (pts.back() - p).norm() > kDupTol) pts.push_back(p);
}

PolyLine straight(const Point3& a, const Point3& b) {
  if ((a - b).norm() <= kDupTol) {
    throw DegenerateGeometry("grasp graph edge between coincident anchors");
  }
  return PolyLine({a, b});
}

// Rope path between two participants, from anchor a to anchor b.
PolyLine rope_path(const RopeState& rope, const GraspVertex& a,
                   const GraspVertex& b) {
  const std::size_t n = rope.points.size();
  const double scale = static_cast<double>(n - 1);
  std::vector<Point3> pts;
  push_unique(pts, a.anchor);
  const bool forward = a.loc < b.loc;
  const double lo = std::min(a.loc, b.loc) * scale;
  const double hi = std::max(a.loc, b.loc) * scale;
  std::vector<std::size_t> inner;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = static_cast<double>(j);
    if (s > lo + 1e-9 && s < hi - 1e-9) inner.push_back(j);
  }
  if (!forward) std::reverse(inner.begin(), inner.end());
  for (std::size_t j : inner) push_unique(pts, rope.points[j]);
  push_unique(pts, b.anchor);
  if (pts.size() < 2) {
    throw DegenerateGeometry("rope path between participants collapsed");
  }
  return PolyLine(std::move(pts));
}

}  // namespace

const GraspEdge* GraspGraph::find_edge(std::size_t u, std::size_t v) const {
  for (const auto& e : edges) {
    if ((e.a == u && e.b == v) || (e.a == v && e.b == u)) return &e;
  }
  return nullptr;
}

std::size_t GraspGraph::gripper_count() const {
  return static_cast<std::size_t>(
      std::count_if(vertices.begin(), vertices.end(), [](const GraspVertex& v) {
        return v.kind == VertexKind::Gripper;
      }));
}

GraphFrame frame_of(const WorldConfig& world) {
  return GraphFrame{world.base, world.attach};
}

GraspGraph build_graph(const SimState& state, const GraphFrame& frame,
                       const std::vector<bool>& active) {
  GraspGraph g;
  g.vertices.push_back({VertexKind::Base, 0, frame.base, 0.0});
  std::vector<GraspVertex> parts;
  for (std::size_t i = 0; i < state.grippers.size(); ++i) {
    const auto& gr = state.grippers[i];
    const bool on = active.empty() || active[i];
    if (gr.grasping && on) {
      parts.push_back(
          {VertexKind::Gripper, static_cast<int>(i), gr.position, gr.grasp_loc});
    }
  }
  if (frame.attach) {
    parts.push_back(
        {VertexKind::Attach, 0, frame.attach->point, frame.attach->loc});
  }
  if (parts.empty()) {
    throw NoParticipants("no grasping gripper and no attach point");
  }
  std::stable_sort(parts.begin(), parts.end(),
                   [](const GraspVertex& a, const GraspVertex& b) {
                     return a.loc < b.loc;
                   });
  for (auto& p : parts) g.vertices.push_back(p);
  for (std::size_t v = 1; v < g.vertices.size(); ++v) {
    g.edges.push_back({0, v, straight(frame.base, g.vertices[v].anchor)});
  }
  for (std::size_t v = 1; v + 1 < g.vertices.size(); ++v) {
    g.edges.push_back(
        {v, v + 1, rope_path(state.rope, g.vertices[v], g.vertices[v + 1])});
  }
  return g;
}

std::vector<Cycle> extract_gripper_cycles(const GraspGraph& g) {
  std::vector<Cycle> out;
  const std::size_t n = g.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!g.find_edge(i, j)) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!g.find_edge(j, k) || !g.find_edge(i, k)) continue;
        const bool has_gripper = g.vertices[i].kind == VertexKind::Gripper ||
                                 g.vertices[j].kind == VertexKind::Gripper ||
                                 g.vertices[k].kind == VertexKind::Gripper;
        if (has_gripper) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

PolyLoop cycle_to_loop(const GraspGraph& g, const Cycle& cycle) {
  std::vector<Point3> pts;
  std::optional<Point3> prev_end;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t u = cycle[k];
    const std::size_t v = cycle[(k + 1) % 3];
    const GraspEdge* e = g.find_edge(u, v);
    if (!e) {
      throw DisconnectedPaths("cycle uses a missing edge");
    }
    std::vector<Point3> path = e->path.points();
    if (e->a != u) std::reverse(path.begin(), path.end());
    if ((path.front() - g.vertices[u].anchor).norm() > kJoinTol ||
        (path.back() - g.vertices[v].anchor).norm() > kJoinTol) {
      throw DisconnectedPaths("edge path does not meet its vertex anchors");
    }
    if (prev_end && (*prev_end - path.front()).norm() > kJoinTol) {
      throw DisconnectedPaths("edge paths do not chain");
    }
    // Drop each path's last point; it is the next path's first.
    for (std::size_t i = 0; i + 1 < path.size(); ++i) push_unique(pts, path[i]);
    prev_end = path.back();
  }
  while (pts.size() > 1 && (pts.back() - pts.front()).norm() <= kDupTol) {
    pts.pop_back();
  }
  return PolyLoop(std::move(pts));
}

SignatureReport analyze_signature(const SimState& state, const Skeleton& skel,
                                  const GraphFrame& frame, double keypoint) {
  std::vector<bool> active(state.grippers.size(), true);
  SignatureReport rep;
  while (true) {
    rep.graph = build_graph(state, frame, active);
    rep.cycles = extract_gripper_cycles(rep.graph);
    rep.loops.clear();
    rep.h.clear();
    std::optional<std::size_t> redundant;
    for (const auto& c : rep.cycles) {
      rep.loops.push_back(cycle_to_loop(rep.graph, c));
      rep.h.push_back(h_vector(rep.loops.back(), skel));
      int grippers = 0;
      for (std::size_t v : c) {
        if (rep.graph.vertices[v].kind == VertexKind::Gripper) ++grippers;
      }
      const bool zero = std::all_of(rep.h.back().begin(), rep.h.back().end(),
                                    [](int x) { return x == 0; });
      if (grippers == 2 && zero) {
        redundant = rep.loops.size() - 1;
        break;
      }
    }
    if (!redundant) break;
    const Cycle& c = rep.cycles[*redundant];
    int drop = -1;
    double drop_dist = -1.0;
    for (std::size_t v : c) {
      const auto& vx = rep.graph.vertices[v];
      if (vx.kind != VertexKind::Gripper) continue;
      const double d = std::abs(vx.loc - keypoint);
      if (d > drop_dist || (d == drop_dist && vx.index > drop)) {
        drop = vx.index;
        drop_dist = d;
      }
    }
    active[static_cast<std::size_t>(drop)] = false;
    rep.removed_grippers.push_back(drop);
  }
  rep.signature = GLSignature(rep.h);
  return rep;
}

GLSignature compute_signature(const SimState& state, const Skeleton& skel,
                              const GraphFrame& frame, double keypoint) {
  return analyze_signature(state, skel, frame, keypoint).signature;
}

GLSignature compute_signature(const SimState& state, const WorldConfig& world,
                              double keypoint) {
  return compute_signature(state, world.skeleton, frame_of(world), keypoint);
}

}  // namespace glsig
