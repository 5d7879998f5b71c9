#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cmgiant/graph_build.hpp"

namespace cmgiant {

/// Cluster decomposition of a configuration-model multigraph.
///
/// Clusters are indexed by rank: 0 is the largest, ties broken by the
/// lowest vertex id contained in the cluster.
struct ComponentSummary {
  std::vector<std::int64_t> sizes;
  /// Per cluster, (degree, vertex count) pairs sorted by degree.
  std::vector<std::vector<std::pair<Degree, std::int64_t>>> degree_hist;
  /// Per cluster edge count; a self-loop counts once, each parallel edge counts.
  std::vector<std::int64_t> edges;
  /// cluster_of[v] is the rank of the cluster containing v.
  std::vector<std::int32_t> cluster_of;

  std::size_t num_vertices() const { return cluster_of.size(); }
  std::size_t num_clusters() const { return sizes.size(); }
  bool in_giant(Vertex v) const { return cluster_of[v] == 0; }
  /// Z_{>=k}: number of vertices in clusters of size at least k.
  std::int64_t vertices_in_clusters_at_least(std::int64_t k) const;
};

/// Exact decomposition by union-find over paired half-edges.
ComponentSummary component_decomposition(const HalfEdgeGraph& g);

struct GiantStatistics {
  double gmax_frac = 0.0;
  double second_frac = 0.0;
  /// v_k(C_max) / n for each degree k present in the giant.
  std::map<Degree, double> vk_frac;
  double edge_frac = 0.0;
};

GiantStatistics giant_statistics(const ComponentSummary& cs, std::size_t n);

struct SumSquares {
  double all = 0.0;
  double large_only = 0.0;
};

SumSquares sum_squares_ratio(const ComponentSummary& cs, std::int64_t k, std::size_t n);

/// (1/n^2) * #{ordered (x,y): |C(x)|,|C(y)| >= k, x and y in different clusters}.
double disconnected_pair_fraction(const ComponentSummary& cs, std::int64_t k, std::size_t n);

/// Number of vertices at distance exactly r from v, found by breadth-first
/// search that stops at depth r.
std::int64_t boundary_size(const HalfEdgeGraph& g, Vertex v, int r);

/// For every vertex, whether |boundary of B_r(v)| >= threshold.
std::vector<char> large_boundary_flags(const HalfEdgeGraph& g, int r, std::int64_t threshold);

/// (1/n^2) * #{ordered (x,y): |boundary B_r(x)|,|boundary B_r(y)| >= r, x and y disconnected}.
double boundary_pair_fraction(const HalfEdgeGraph& g, const ComponentSummary& cs, int r);
double boundary_pair_fraction(const HalfEdgeGraph& g, int r);

}  // namespace cmgiant
