#include "cmgiant/components.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cmgiant {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), Vertex{0});
  }

  Vertex find(Vertex v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<Vertex> parent_;
  std::vector<std::int64_t> size_;
};

// Sum of s weighted over clusters passing the filter, and the sum of s^2.
template <class Weight>
std::pair<double, double> linear_and_square(const std::vector<std::int64_t>& counts, Weight keep) {
  double lin = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!keep(i)) continue;
    const auto s = static_cast<double>(counts[i]);
    lin += s;
    sq += s * s;
  }
  return {lin, sq};
}

}  // namespace

std::int64_t ComponentSummary::vertices_in_clusters_at_least(std::int64_t k) const {
  std::int64_t z = 0;
  for (std::int64_t s : sizes) {
    if (s < k) break;
    z += s;
  }
  return z;
}

ComponentSummary component_decomposition(const HalfEdgeGraph& g) {
  const std::size_t n = g.num_vertices();
  DisjointSets dsu(n);
  const auto ell = static_cast<HalfEdge>(g.num_half_edges());
  for (HalfEdge x = 0; x < ell; ++x) {
    const HalfEdge y = g.mate(x);
    if (x < y) dsu.unite(g.owner(x), g.owner(y));
  }

  // Clusters in order of first (lowest) vertex, then stable-sorted by size.
  std::vector<std::int32_t> provisional(n, -1);
  std::vector<std::int64_t> sizes;
  std::vector<Vertex> root_to_cluster(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const Vertex r = dsu.find(static_cast<Vertex>(v));
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<Vertex>(sizes.size());
      sizes.push_back(0);
    }
    provisional[v] = root_to_cluster[r];
    ++sizes[provisional[v]];
  }
  std::vector<std::int32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int32_t a, std::int32_t b) { return sizes[a] > sizes[b]; });
  std::vector<std::int32_t> rank(sizes.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<std::int32_t>(i);

  ComponentSummary cs;
  cs.sizes.resize(sizes.size());
  cs.edges.assign(sizes.size(), 0);
  cs.degree_hist.resize(sizes.size());
  cs.cluster_of.resize(n);
  for (std::size_t i = 0; i < sizes.size(); ++i) cs.sizes[rank[i]] = sizes[i];

  std::vector<std::map<Degree, std::int64_t>> hist(sizes.size());
  for (std::size_t v = 0; v < n; ++v) {
    const std::int32_t c = rank[provisional[v]];
    cs.cluster_of[v] = c;
    ++hist[c][g.degree(static_cast<Vertex>(v))];
  }
  for (std::size_t c = 0; c < hist.size(); ++c) {
    cs.degree_hist[c].assign(hist[c].begin(), hist[c].end());
  }
  for (HalfEdge x = 0; x < ell; ++x) {
    if (x < g.mate(x)) ++cs.edges[cs.cluster_of[g.owner(x)]];
  }
  return cs;
}

GiantStatistics giant_statistics(const ComponentSummary& cs, std::size_t n) {
  GiantStatistics st;
  if (cs.sizes.empty()) return st;
  std::int64_t total = std::accumulate(cs.sizes.begin(), cs.sizes.end(), std::int64_t{0});
  if (static_cast<std::size_t>(total) != n) {
    throw ModelError("giant_statistics: n differs from the sum of cluster sizes");
  }
  const auto nn = static_cast<double>(n);
  st.gmax_frac = static_cast<double>(cs.sizes[0]) / nn;
  st.second_frac = cs.sizes.size() > 1 ? static_cast<double>(cs.sizes[1]) / nn : 0.0;
  for (const auto& [k, count] : cs.degree_hist[0]) st.vk_frac[k] = static_cast<double>(count) / nn;
  st.edge_frac = static_cast<double>(cs.edges[0]) / nn;
  return st;
}

SumSquares sum_squares_ratio(const ComponentSummary& cs, std::int64_t k, std::size_t n) {
  if (k < 1) throw ModelError("sum_squares_ratio: k must be >= 1");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  SumSquares out;
  out.all = linear_and_square(cs.sizes, [](std::size_t) { return true; }).second / n2;
  out.large_only = linear_and_square(cs.sizes, [&](std::size_t i) { return cs.sizes[i] >= k; }).second / n2;
  return out;
}

double disconnected_pair_fraction(const ComponentSummary& cs, std::int64_t k, std::size_t n) {
  if (k < 1) throw ModelError("disconnected_pair_fraction: k must be >= 1");
  const auto [lin, sq] = linear_and_square(cs.sizes, [&](std::size_t i) { return cs.sizes[i] >= k; });
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  return (lin * lin - sq) / n2;
}

std::int64_t boundary_size(const HalfEdgeGraph& g, Vertex v, int r) {
  // Small local BFS; vertex sets at desk-scale radii stay tiny.
  std::vector<Vertex> frontier{v};
  std::vector<Vertex> seen{v};
  for (int depth = 0; depth < r && !frontier.empty(); ++depth) {
    std::vector<Vertex> next;
    for (Vertex u : frontier) {
      const HalfEdge end = g.first_half_edge(u) + g.degree(u);
      for (HalfEdge x = g.first_half_edge(u); x < end; ++x) {
        const Vertex w = g.neighbor(x);
        if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
        seen.push_back(w);
        next.push_back(w);
      }
    }
    frontier.swap(next);
  }
  return static_cast<std::int64_t>(frontier.size());
}

std::vector<char> large_boundary_flags(const HalfEdgeGraph& g, int r, std::int64_t threshold) {
  const std::size_t n = g.num_vertices();
  std::vector<char> flags(n, 0);
  // Epoch-stamped BFS shared across roots.
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t epoch = 0;
  std::vector<Vertex> frontier;
  std::vector<Vertex> next;
  auto reaches = [&](Vertex root) {
    ++epoch;
    frontier.assign(1, root);
    stamp[root] = epoch;
    for (int depth = 0; depth < r && !frontier.empty(); ++depth) {
      next.clear();
      const bool last = depth + 1 == r;
      for (Vertex u : frontier) {
        const HalfEdge end = g.first_half_edge(u) + g.degree(u);
        for (HalfEdge x = g.first_half_edge(u); x < end; ++x) {
          const Vertex w = g.neighbor(x);
          if (stamp[w] == epoch) continue;
          stamp[w] = epoch;
          next.push_back(w);
          if (last && static_cast<std::int64_t>(next.size()) >= threshold) return true;
        }
      }
      frontier.swap(next);
    }
    return static_cast<std::int64_t>(frontier.size()) >= threshold;
  };
  for (std::size_t v = 0; v < n; ++v) flags[v] = reaches(static_cast<Vertex>(v)) ? 1 : 0;
  return flags;
}

double boundary_pair_fraction(const HalfEdgeGraph& g, const ComponentSummary& cs, int r) {
  if (r < 1) throw ModelError("boundary_pair_fraction: r must be >= 1");
  const std::vector<char> flags = large_boundary_flags(g, r, r);
  std::vector<std::int64_t> per_cluster(cs.num_clusters(), 0);
  for (std::size_t v = 0; v < flags.size(); ++v) {
    if (flags[v]) ++per_cluster[cs.cluster_of[v]];
  }
  const auto [lin, sq] = linear_and_square(per_cluster, [](std::size_t) { return true; });
  const double n = static_cast<double>(g.num_vertices());
  return (lin * lin - sq) / (n * n);
}

double boundary_pair_fraction(const HalfEdgeGraph& g, int r) {
  return boundary_pair_fraction(g, component_decomposition(g), r);
}

}  // namespace cmgiant
