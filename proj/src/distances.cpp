#include "cmgiant/distances.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace cmgiant {

std::map<std::int64_t, std::int64_t> DistanceSample::histogram() const {
  std::map<std::int64_t, std::int64_t> h;
  for (auto d : finite_distances) ++h[d];
  return h;
}

DistanceOracle::DistanceOracle(const HalfEdgeGraph& g)
    : graph_(&g), stamp_(g.num_vertices(), 0), depth_(g.num_vertices(), 0) {}

std::optional<std::int64_t> DistanceOracle::distance(Vertex u, Vertex v) {
  if (u == v) return 0;
  const HalfEdgeGraph& g = *graph_;
  // Two epochs per query: side A uses epoch_, side B uses epoch_ + 1.
  epoch_ += 2;
  if (epoch_ < 2) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 2;
  }
  const std::uint32_t mark[2] = {epoch_, epoch_ + 1};
  std::vector<Vertex> frontier[2] = {{u}, {v}};
  stamp_[u] = mark[0];
  stamp_[v] = mark[1];
  depth_[u] = 0;
  depth_[v] = 0;
  std::int64_t level[2] = {0, 0};
  std::vector<Vertex> next;
  while (!frontier[0].empty() && !frontier[1].empty()) {
    // Expand the side whose frontier has fewer half-edges.
    auto volume = [&](const std::vector<Vertex>& f) {
      std::int64_t s = 0;
      for (Vertex w : f) s += g.degree(w);
      return s;
    };
    const int side = volume(frontier[0]) <= volume(frontier[1]) ? 0 : 1;
    const int other = 1 - side;
    next.clear();
    std::optional<std::int64_t> best;
    for (Vertex a : frontier[side]) {
      const HalfEdge end = g.first_half_edge(a) + g.degree(a);
      for (HalfEdge x = g.first_half_edge(a); x < end; ++x) {
        const Vertex w = g.neighbor(x);
        if (stamp_[w] == mark[other]) {
          const std::int64_t d = level[side] + 1 + depth_[w];
          if (!best || d < *best) best = d;
        } else if (stamp_[w] != mark[side]) {
          stamp_[w] = mark[side];
          depth_[w] = static_cast<std::int32_t>(level[side] + 1);
          next.push_back(w);
        }
      }
    }
    if (best) return best;
    frontier[side].swap(next);
    ++level[side];
  }
  return std::nullopt;
}

std::vector<std::int64_t> bfs_distances(const HalfEdgeGraph& g, Vertex source) {
  std::vector<std::int64_t> dist(g.num_vertices(), -1);
  std::vector<Vertex> queue{source};
  dist[source] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const Vertex a = queue[h];
    const HalfEdge end = g.first_half_edge(a) + g.degree(a);
    for (HalfEdge x = g.first_half_edge(a); x < end; ++x) {
      const Vertex w = g.neighbor(x);
      if (dist[w] < 0) {
        dist[w] = dist[a] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

DistanceSample sample_distances(const HalfEdgeGraph& g, std::size_t pairs, Rng& rng) {
  if (pairs == 0) throw ModelError("sample_distances: pairs must be >= 1");
  DistanceOracle oracle(g);
  DistanceSample ds;
  const std::size_t n = g.num_vertices();
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto o1 = static_cast<Vertex>(rng.below(n));
    const auto o2 = static_cast<Vertex>(rng.below(n));
    ++ds.pairs_attempted;
    if (auto d = oracle.distance(o1, o2)) {
      ds.finite_distances.push_back(*d);
    } else {
      ++ds.infinite_count;
    }
  }
  return ds;
}

ScalingReport scaling_report(const DistanceSample& ds, std::size_t n, double nu) {
  if (!(nu > 1.0)) throw ModelError("scaling_report: nu must exceed 1");
  if (n < 3) throw ModelError("scaling_report: n must be >= 3");
  ScalingReport rep;
  rep.predicted = std::log(static_cast<double>(n)) / std::log(nu);
  if (ds.pairs_attempted > 0) {
    rep.finite_fraction =
        static_cast<double>(ds.finite_distances.size()) / static_cast<double>(ds.pairs_attempted);
  }
  if (ds.finite_distances.empty()) return rep;
  double sum = 0.0;
  for (auto d : ds.finite_distances) sum += static_cast<double>(d);
  rep.mean_ratio = sum / static_cast<double>(ds.finite_distances.size()) / rep.predicted;
  std::vector<std::int64_t> sorted = ds.finite_distances;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? static_cast<double>(sorted[m / 2])
                              : 0.5 * static_cast<double>(sorted[m / 2 - 1] + sorted[m / 2]);
  rep.median_ratio = median / rep.predicted;
  return rep;
}

void write_distance_histogram(std::ostream& os, const DistanceSample& ds, std::size_t n, double nu,
                              std::uint64_t seed) {
  os << "# n=" << n << ",nu=" << std::setprecision(17) << nu << ",seed=" << seed << '\n';
  os << "distance,count\n";
  for (const auto& [d, c] : ds.histogram()) os << d << ',' << c << '\n';
  if (ds.infinite_count > 0) os << "inf," << ds.infinite_count << '\n';
}

}  // namespace cmgiant
