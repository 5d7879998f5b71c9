#pragma once

#include <utility>
#include <vector>

#include "cmgiant/graph_build.hpp"

namespace testutil {

using cmgiant::DegreeSequence;
using cmgiant::HalfEdge;
using cmgiant::HalfEdgeGraph;
using cmgiant::Vertex;

// Builds the multigraph with the given edge list; half-edges of each vertex
// are handed out in edge order.
inline HalfEdgeGraph from_edges(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<cmgiant::Degree> deg(n, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  std::vector<HalfEdge> next(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) next[v + 1] = next[v] + deg[v];
  std::vector<HalfEdge> mate(static_cast<std::size_t>(next[n]), -1);
  for (auto [u, v] : edges) {
    const HalfEdge x = next[u]++;
    const HalfEdge y = next[v]++;
    mate[x] = y;
    mate[y] = x;
  }
  return HalfEdgeGraph(DegreeSequence(deg), std::move(mate));
}

inline HalfEdgeGraph cycle(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (std::size_t i = 0; i < n; ++i) {
    e.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n));
  }
  return from_edges(n, e);
}

inline HalfEdgeGraph perfect_matching(std::size_t pairs) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (std::size_t i = 0; i < pairs; ++i) e.emplace_back(2 * i, 2 * i + 1);
  return from_edges(2 * pairs, e);
}

// Connected components by plain DFS, as labels in first-visit order.
inline std::vector<int> dfs_labels(const HalfEdgeGraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<Vertex> stack{static_cast<Vertex>(s)};
    label[s] = next;
    while (!stack.empty()) {
      const Vertex a = stack.back();
      stack.pop_back();
      for (HalfEdge x = g.first_half_edge(a); x < g.first_half_edge(a) + g.degree(a); ++x) {
        const Vertex w = g.neighbor(x);
        if (label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace testutil
