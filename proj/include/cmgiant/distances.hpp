#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "cmgiant/graph_build.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

struct DistanceSample {
  std::int64_t pairs_attempted = 0;
  std::vector<std::int64_t> finite_distances;
  std::int64_t infinite_count = 0;

  std::map<std::int64_t, std::int64_t> histogram() const;
};

/// Bidirectional breadth-first search between fixed endpoints; reusable
/// scratch space sized to one graph.
class DistanceOracle {
 public:
  explicit DistanceOracle(const HalfEdgeGraph& g);
  /// Graph distance, or nullopt when u and v lie in different components.
  std::optional<std::int64_t> distance(Vertex u, Vertex v);

 private:
  const HalfEdgeGraph* graph_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int32_t> depth_;
  std::uint32_t epoch_ = 0;
};

/// Single-source BFS distances; -1 for unreachable vertices.
std::vector<std::int64_t> bfs_distances(const HalfEdgeGraph& g, Vertex source);

/// Independent uniform (o1, o2) per pair; o1 == o2 counts as distance 0.
DistanceSample sample_distances(const HalfEdgeGraph& g, std::size_t pairs, Rng& rng);

struct ScalingReport {
  double predicted = 0.0;  // log n / log nu
  double mean_ratio = 0.0;
  double median_ratio = 0.0;
  double finite_fraction = 0.0;
};

/// Throws ModelError unless nu > 1 and n >= 3.
ScalingReport scaling_report(const DistanceSample& ds, std::size_t n, double nu);

/// "distance,count" rows preceded by "# n=...,nu=...,seed=..." metadata.
void write_distance_histogram(std::ostream& os, const DistanceSample& ds, std::size_t n, double nu,
                              std::uint64_t seed);

}  // namespace cmgiant
