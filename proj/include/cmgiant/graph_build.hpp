#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "cmgiant/degree_model.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

using HalfEdge = std::int64_t;

/// Multigraph stored as a perfect matching on half-edge labels.
///
/// Half-edges of vertex v are the labels offsets[v] .. offsets[v+1]-1, so
/// labels are assigned in vertex order and then in half-edge order. A
/// self-loop pairs two labels of the same vertex; multi-edges are kept.
class HalfEdgeGraph {
 public:
  HalfEdgeGraph() = default;
  /// Throws ModelError unless mate is a fixed-point-free involution on
  /// [0, seq.total_degree()).
  HalfEdgeGraph(const DegreeSequence& seq, std::vector<HalfEdge> mate);

  std::size_t num_vertices() const { return offsets_.size() - 1; }
  std::size_t num_half_edges() const { return mate_.size(); }
  std::size_t num_edges() const { return mate_.size() / 2; }

  Degree degree(Vertex v) const {
    return static_cast<Degree>(offsets_[v + 1] - offsets_[v]);
  }
  HalfEdge first_half_edge(Vertex v) const { return offsets_[v]; }
  HalfEdge mate(HalfEdge x) const { return mate_[x]; }
  Vertex owner(HalfEdge x) const { return owner_[x]; }
  /// Vertex at the other end of half-edge x.
  Vertex neighbor(HalfEdge x) const { return owner_[mate_[x]]; }

  std::span<const HalfEdge> offsets() const { return offsets_; }
  std::span<const HalfEdge> mates() const { return mate_; }
  DegreeSequence degree_sequence() const;

  /// Re-checks the involution invariant; throws ModelError on violation.
  void validate() const;

  /// Vertices of b are shifted by this->num_vertices().
  static HalfEdgeGraph disjoint_union(const HalfEdgeGraph& a, const HalfEdgeGraph& b);

 private:
  std::vector<HalfEdge> offsets_{0};
  std::vector<HalfEdge> mate_;
  std::vector<Vertex> owner_;
};

/// Uniform perfect matching: repeatedly pair the lowest unpaired label with a
/// uniformly chosen other unpaired label. O(total degree).
std::vector<HalfEdge> uniform_matching(std::size_t num_half_edges, Rng& rng);

HalfEdgeGraph pair_half_edges(const DegreeSequence& seq, Rng& rng);

/// Degree truncation at b with explosion of the surplus half-edges into new
/// degree-1 vertices numbered n, n+1, ... in order of their origin vertex.
struct ExplosionMap {
  std::size_t original_n = 0;
  Degree bound = 0;
  DegreeSequence original_degrees;
  DegreeSequence truncated_degrees;
  /// origin[i] is the vertex of [n] that exploded vertex n+i was split from.
  std::vector<Vertex> origin;
  /// relabel[x] is the label in the truncated model of original half-edge x.
  std::vector<HalfEdge> relabel;

  std::size_t exploded_count() const { return origin.size(); }
};

ExplosionMap truncate_explode(const DegreeSequence& seq, Degree b);

struct CoupledGraphs {
  HalfEdgeGraph original;
  HalfEdgeGraph truncated;
};

/// One uniform matching on the shared labels, read in both models.
CoupledGraphs coupled_pairing(const ExplosionMap& map, Rng& rng);
/// Same, with the matching on original labels supplied by the caller.
CoupledGraphs coupled_pairing(const ExplosionMap& map, std::vector<HalfEdge> mate);

/// "u v" per edge, one line per half-edge pair, in increasing order of the
/// lower label. Self-loops appear as "v v" once per loop.
void write_edge_list(std::ostream& os, const HalfEdgeGraph& g);

}  // namespace cmgiant
