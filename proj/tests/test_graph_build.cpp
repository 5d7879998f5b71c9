#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "cmgiant/graph_build.hpp"

using namespace cmgiant;

namespace {

// Every perfect matching on [0, ell).
std::vector<std::vector<HalfEdge>> all_matchings(std::int64_t ell) {
  std::vector<std::vector<HalfEdge>> out;
  std::vector<HalfEdge> mate(static_cast<std::size_t>(ell), -1);
  std::function<void()> rec = [&] {
    HalfEdge x = 0;
    while (x < ell && mate[x] != -1) ++x;
    if (x == ell) {
      out.push_back(mate);
      return;
    }
    for (HalfEdge y = x + 1; y < ell; ++y) {
      if (mate[y] != -1) continue;
      mate[x] = y;
      mate[y] = x;
      rec();
      mate[x] = mate[y] = -1;
    }
  };
  rec();
  return out;
}

bool is_involution(std::span<const HalfEdge> mate) {
  for (std::size_t x = 0; x < mate.size(); ++x) {
    const HalfEdge y = mate[x];
    if (y < 0 || static_cast<std::size_t>(y) >= mate.size() || y == static_cast<HalfEdge>(x)) return false;
    if (mate[y] != static_cast<HalfEdge>(x)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("graph_build") {

TEST_CASE("constructor rejects non-involutions") {
  const DegreeSequence s({1, 1});
  CHECK_NOTHROW(HalfEdgeGraph(s, {1, 0}));
  CHECK_THROWS_AS(HalfEdgeGraph(s, {0, 1}), ModelError);
  CHECK_THROWS_AS(HalfEdgeGraph(s, {1}), ModelError);
  CHECK_THROWS_AS(HalfEdgeGraph(DegreeSequence({1, 1, 2}), {1, 0, 3, 1}), ModelError);
}

TEST_CASE("forced pairings") {
  Rng rng(3);
  const HalfEdgeGraph g = pair_half_edges(DegreeSequence({1, 1}), rng);
  CHECK(g.neighbor(0) == 1);
  CHECK(g.num_edges() == 1);
  const HalfEdgeGraph loop = pair_half_edges(DegreeSequence({2}), rng);
  CHECK(loop.mate(0) == 1);
  CHECK(loop.neighbor(0) == 0);
  CHECK(loop.num_edges() == 1);
}

TEST_CASE("built graphs are fixed-point-free involutions with consistent ownership") {
  Rng rng(99);
  const Pmf p = Pmf::from_map({{1, 0.4}, {2, 0.2}, {3, 0.2}, {7, 0.2}});
  for (int t = 0; t < 50; ++t) {
    const DegreeSequence s = sample_iid_degrees(p, 1 + rng.below(300), rng);
    const HalfEdgeGraph g = pair_half_edges(s, rng);
    CHECK(is_involution(g.mates()));
    CHECK(g.degree_sequence() == s);
    for (std::size_t v = 0; v < s.size(); ++v) {
      for (HalfEdge x = g.first_half_edge(v); x < g.first_half_edge(v) + g.degree(v); ++x) {
        CHECK(g.owner(x) == static_cast<Vertex>(v));
      }
    }
    CHECK_NOTHROW(g.validate());
  }
}

TEST_CASE("self-loop probability at the degree-2 vertex of (1,1,2) is 1/3") {
  // The three matchings on labels {0},{1},{2,3}: only {01,23} has a loop.
  const auto ms = all_matchings(4);
  REQUIRE(ms.size() == 3);
  int loops = 0;
  for (const auto& m : ms) loops += m[2] == 3;
  CHECK(loops == 1);

  int hits = 0;
  const int seeds = 20000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(split_seed(s, 0, 42));
    hits += pair_half_edges(DegreeSequence({1, 1, 2}), rng).mate(2) == 3;
  }
  CHECK(std::abs(hits / double(seeds) - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("matching distribution is uniform (chi-square)") {
  const auto ms = all_matchings(4);
  std::map<std::vector<HalfEdge>, int> index;
  for (std::size_t i = 0; i < ms.size(); ++i) index[ms[i]] = static_cast<int>(i);
  std::vector<int> count(ms.size(), 0);
  const int seeds = 100000;
  Rng rng(7);
  for (int s = 0; s < seeds; ++s) {
    const HalfEdgeGraph g = pair_half_edges(DegreeSequence({1, 1, 2}), rng);
    const std::vector<HalfEdge> m(g.mates().begin(), g.mates().end());
    ++count[index.at(m)];
  }
  double chi2 = 0.0;
  const double expected = seeds / 3.0;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  // 0.999 quantile of chi-square with 2 degrees of freedom.
  CHECK(chi2 < 13.816);
}

TEST_CASE("uniform matching on six labels visits all 15 matchings evenly") {
  const auto ms = all_matchings(6);
  REQUIRE(ms.size() == 15);
  std::map<std::vector<HalfEdge>, int> count;
  Rng rng(5);
  const int draws = 150000;
  for (int i = 0; i < draws; ++i) ++count[uniform_matching(6, rng)];
  CHECK(count.size() == 15);
  double chi2 = 0.0;
  for (const auto& [m, c] : count) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  // 0.999 quantile of chi-square with 14 degrees of freedom.
  CHECK(chi2 < 36.12);
}

TEST_CASE("truncate_explode hand traces") {
  const ExplosionMap a = truncate_explode(DegreeSequence({5, 1}), 3);
  CHECK(a.original_n == 2);
  CHECK(a.truncated_degrees.size() == 4);
  CHECK(std::vector<Degree>(a.truncated_degrees.degrees().begin(), a.truncated_degrees.degrees().end()) ==
        std::vector<Degree>{3, 1, 1, 1});
  CHECK(a.truncated_degrees.total_degree() == 6);
  CHECK(a.exploded_count() == 2);
  CHECK(a.origin == std::vector<Vertex>{0, 0});
  // Vertex 0 keeps labels 0..2; its labels 3, 4 move to the exploded vertices.
  CHECK(a.relabel == std::vector<HalfEdge>{0, 1, 2, 4, 5, 3});

  const ExplosionMap b = truncate_explode(DegreeSequence({2, 2}), 3);
  CHECK(b.truncated_degrees == b.original_degrees);
  CHECK(b.exploded_count() == 0);
  CHECK(b.relabel == std::vector<HalfEdge>{0, 1, 2, 3});

  const ExplosionMap c = truncate_explode(DegreeSequence({4}), 1);
  CHECK(std::vector<Degree>(c.truncated_degrees.degrees().begin(), c.truncated_degrees.degrees().end()) ==
        std::vector<Degree>{1, 1, 1, 1});
  CHECK(c.exploded_count() == 3);

  CHECK_THROWS_AS(truncate_explode(DegreeSequence({2}), 0), ModelError);
}

TEST_CASE("truncation fuzz: properties (a) and (b)") {
  Rng rng(123);
  const Pmf p = Pmf::from_map({{1, 0.3}, {2, 0.1}, {4, 0.3}, {9, 0.2}, {15, 0.1}});
  for (int t = 0; t < 200; ++t) {
    const DegreeSequence s = sample_iid_degrees(p, 1 + rng.below(200), rng);
    const auto b = static_cast<Degree>(1 + rng.below(12));
    const ExplosionMap m = truncate_explode(s, b);
    std::int64_t surplus = 0;
    for (std::size_t v = 0; v < s.size(); ++v) {
      CHECK(m.truncated_degrees[v] == std::min(s[v], b));
      surplus += std::max(0, s[v] - b);
    }
    CHECK(static_cast<std::int64_t>(m.exploded_count()) == surplus);
    for (std::size_t v = s.size(); v < m.truncated_degrees.size(); ++v) CHECK(m.truncated_degrees[v] == 1);
    CHECK(m.truncated_degrees.total_degree() == s.total_degree());
    // relabel is a bijection onto [ell).
    std::vector<HalfEdge> sorted = m.relabel;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == static_cast<HalfEdge>(i));
    // Exploded labels originate at their origin vertex, in origin order.
    for (std::size_t i = 1; i < m.origin.size(); ++i) CHECK(m.origin[i - 1] <= m.origin[i]);
  }
}

TEST_CASE("coupled pairing without explosion is label-identical") {
  Rng rng(8);
  const ExplosionMap m = truncate_explode(DegreeSequence({2, 3, 1, 2}), 5);
  const CoupledGraphs cg = coupled_pairing(m, rng);
  CHECK(std::vector<HalfEdge>(cg.original.mates().begin(), cg.original.mates().end()) ==
        std::vector<HalfEdge>(cg.truncated.mates().begin(), cg.truncated.mates().end()));
}

TEST_CASE("connectivity in the truncated model implies it in the original: exhaustive for (5,1), b=3") {
  const ExplosionMap m = truncate_explode(DegreeSequence({5, 1}), 3);
  for (const auto& mate : all_matchings(6)) {
    const CoupledGraphs cg = coupled_pairing(m, mate);
    CHECK(is_involution(cg.truncated.mates()));
    const auto lo = testutil::dfs_labels(cg.original);
    const auto lt = testutil::dfs_labels(cg.truncated);
    for (Vertex u = 0; u < 2; ++u) {
      for (Vertex v = 0; v < 2; ++v) {
        if (lt[u] == lt[v]) CHECK(lo[u] == lo[v]);
      }
    }
    // Each shared label pairs to the image of its original mate.
    for (HalfEdge x = 0; x < 6; ++x) CHECK(cg.truncated.mate(m.relabel[x]) == m.relabel[mate[x]]);
  }
}

TEST_CASE("connectivity in the truncated model implies it in the original: Monte Carlo") {
  const Pmf p = Pmf::from_map({{1, 0.4}, {3, 0.3}, {8, 0.2}, {20, 0.1}});
  std::int64_t violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(split_seed(seed, 10000, 9));
    const DegreeSequence s = sample_iid_degrees(p, 10000, rng);
    const CoupledGraphs cg = coupled_pairing(truncate_explode(s, 5), rng);
    const auto lo = testutil::dfs_labels(cg.original);
    const auto lt = testutil::dfs_labels(cg.truncated);
    for (int i = 0; i < 1000; ++i) {
      const auto u = rng.below(10000);
      const auto v = rng.below(10000);
      violations += lt[u] == lt[v] && lo[u] != lo[v];
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("edge list export") {
  const HalfEdgeGraph g = testutil::from_edges(3, {{0, 1}, {2, 2}, {1, 2}});
  std::ostringstream os;
  write_edge_list(os, g);
  std::multiset<std::string> lines;
  std::istringstream is(os.str());
  for (std::string l; std::getline(is, l);) lines.insert(l);
  CHECK(lines == std::multiset<std::string>{"0 1", "2 2", "1 2"});

  Rng a(4);
  Rng b(4);
  std::ostringstream x;
  std::ostringstream y;
  write_edge_list(x, pair_half_edges(DegreeSequence({3, 1, 2, 2}), a));
  write_edge_list(y, pair_half_edges(DegreeSequence({3, 1, 2, 2}), b));
  CHECK(x.str() == y.str());
}

TEST_CASE("disjoint union shifts the second graph") {
  const HalfEdgeGraph u = HalfEdgeGraph::disjoint_union(testutil::cycle(3), testutil::perfect_matching(1));
  CHECK(u.num_vertices() == 5);
  CHECK(u.num_edges() == 4);
  CHECK(u.neighbor(u.first_half_edge(3)) == 4);
  CHECK(is_involution(u.mates()));
}

}
