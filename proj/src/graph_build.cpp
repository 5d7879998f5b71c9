#include "cmgiant/graph_build.hpp"

#include <numeric>
#include <ostream>
#include <string>

namespace cmgiant {

HalfEdgeGraph::HalfEdgeGraph(const DegreeSequence& seq, std::vector<HalfEdge> mate)
    : mate_(std::move(mate)) {
  const std::size_t n = seq.size();
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + seq[v];
  if (static_cast<std::size_t>(offsets_.back()) != mate_.size()) {
    throw ModelError("half-edge graph: matching size differs from total degree");
  }
  owner_.resize(mate_.size());
  for (std::size_t v = 0; v < n; ++v) {
    for (HalfEdge x = offsets_[v]; x < offsets_[v + 1]; ++x) owner_[x] = static_cast<Vertex>(v);
  }
  validate();
}

void HalfEdgeGraph::validate() const {
  const auto ell = static_cast<HalfEdge>(mate_.size());
  for (HalfEdge x = 0; x < ell; ++x) {
    const HalfEdge y = mate_[x];
    if (y < 0 || y >= ell || y == x || mate_[y] != x) {
      throw ModelError("half-edge graph: mate is not a fixed-point-free involution at label " +
                       std::to_string(x));
    }
  }
}

DegreeSequence HalfEdgeGraph::degree_sequence() const {
  std::vector<Degree> d(num_vertices());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = degree(static_cast<Vertex>(v));
  return DegreeSequence(std::move(d));
}

HalfEdgeGraph HalfEdgeGraph::disjoint_union(const HalfEdgeGraph& a, const HalfEdgeGraph& b) {
  std::vector<Degree> d;
  d.reserve(a.num_vertices() + b.num_vertices());
  for (std::size_t v = 0; v < a.num_vertices(); ++v) d.push_back(a.degree(static_cast<Vertex>(v)));
  for (std::size_t v = 0; v < b.num_vertices(); ++v) d.push_back(b.degree(static_cast<Vertex>(v)));
  std::vector<HalfEdge> mate(a.mate_);
  const auto shift = static_cast<HalfEdge>(a.num_half_edges());
  for (HalfEdge y : b.mate_) mate.push_back(y + shift);
  return HalfEdgeGraph(DegreeSequence(std::move(d)), std::move(mate));
}

std::vector<HalfEdge> uniform_matching(std::size_t num_half_edges, Rng& rng) {
  const auto ell = static_cast<HalfEdge>(num_half_edges);
  std::vector<HalfEdge> mate(num_half_edges, -1);
  // pool[0..live) holds the unpaired labels; pos inverts pool.
  std::vector<HalfEdge> pool(num_half_edges);
  std::vector<HalfEdge> pos(num_half_edges);
  std::iota(pool.begin(), pool.end(), HalfEdge{0});
  std::iota(pos.begin(), pos.end(), HalfEdge{0});
  HalfEdge live = ell;
  auto remove = [&](HalfEdge x) {
    const HalfEdge i = pos[x];
    const HalfEdge last = pool[live - 1];
    pool[i] = last;
    pos[last] = i;
    pool[live - 1] = x;
    pos[x] = live - 1;
    --live;
  };
  HalfEdge cursor = 0;
  while (live > 0) {
    while (mate[cursor] != -1) ++cursor;
    const HalfEdge x = cursor;
    remove(x);
    const HalfEdge y = pool[rng.below(static_cast<std::uint64_t>(live))];
    remove(y);
    mate[x] = y;
    mate[y] = x;
  }
  return mate;
}

HalfEdgeGraph pair_half_edges(const DegreeSequence& seq, Rng& rng) {
  return HalfEdgeGraph(seq, uniform_matching(static_cast<std::size_t>(seq.total_degree()), rng));
}

ExplosionMap truncate_explode(const DegreeSequence& seq, Degree b) {
  if (b < 1) throw ModelError("truncate_explode: bound must be >= 1");
  ExplosionMap map;
  map.original_n = seq.size();
  map.bound = b;
  map.original_degrees = seq;

  std::vector<Degree> truncated(seq.size());
  for (std::size_t v = 0; v < seq.size(); ++v) {
    truncated[v] = std::min(seq[v], b);
    for (Degree j = b; j < seq[v]; ++j) map.origin.push_back(static_cast<Vertex>(v));
  }
  truncated.resize(seq.size() + map.origin.size(), 1);

  // Offsets of the truncated model; exploded vertices come after [n].
  std::vector<HalfEdge> offsets(truncated.size() + 1, 0);
  for (std::size_t v = 0; v < truncated.size(); ++v) offsets[v + 1] = offsets[v] + truncated[v];

  map.relabel.resize(static_cast<std::size_t>(seq.total_degree()));
  HalfEdge label = 0;
  std::size_t next_exploded = seq.size();
  for (std::size_t v = 0; v < seq.size(); ++v) {
    for (Degree j = 0; j < seq[v]; ++j, ++label) {
      if (j < b) {
        map.relabel[label] = offsets[v] + j;
      } else {
        map.relabel[label] = offsets[next_exploded++];
      }
    }
  }
  map.truncated_degrees = DegreeSequence(std::move(truncated));
  return map;
}

CoupledGraphs coupled_pairing(const ExplosionMap& map, std::vector<HalfEdge> mate) {
  std::vector<HalfEdge> mate_truncated(mate.size());
  for (std::size_t x = 0; x < mate.size(); ++x) {
    mate_truncated[map.relabel[x]] = map.relabel[mate[x]];
  }
  return {HalfEdgeGraph(map.original_degrees, std::move(mate)),
          HalfEdgeGraph(map.truncated_degrees, std::move(mate_truncated))};
}

CoupledGraphs coupled_pairing(const ExplosionMap& map, Rng& rng) {
  return coupled_pairing(
      map, uniform_matching(static_cast<std::size_t>(map.original_degrees.total_degree()), rng));
}

void write_edge_list(std::ostream& os, const HalfEdgeGraph& g) {
  const auto ell = static_cast<HalfEdge>(g.num_half_edges());
  for (HalfEdge x = 0; x < ell; ++x) {
    const HalfEdge y = g.mate(x);
    if (x < y) os << g.owner(x) << ' ' << g.owner(y) << '\n';
  }
}

}  // namespace cmgiant
