#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "cmgiant/distances.hpp"

using namespace cmgiant;

TEST_SUITE("distances") {

TEST_CASE("perfect matching: partners at distance 1, others unreachable") {
  const HalfEdgeGraph g = testutil::perfect_matching(5);
  DistanceOracle o(g);
  for (Vertex u = 0; u < 10; ++u) {
    for (Vertex v = 0; v < 10; ++v) {
      const auto d = o.distance(u, v);
      if (u == v) {
        CHECK(d == 0);
      } else if (u / 2 == v / 2) {
        CHECK(d == 1);
      } else {
        CHECK_FALSE(d.has_value());
      }
    }
  }
}

TEST_CASE("4-cycle distances") {
  const HalfEdgeGraph g = testutil::cycle(4);
  DistanceOracle o(g);
  CHECK(o.distance(0, 1) == 1);
  CHECK(o.distance(0, 3) == 1);
  CHECK(o.distance(0, 2) == 2);
  CHECK(o.distance(1, 3) == 2);
  CHECK(o.distance(2, 2) == 0);
  CHECK(bfs_distances(g, 0) == std::vector<std::int64_t>{0, 1, 2, 1});
}

TEST_CASE("loops and multi-edges do not shorten paths") {
  const HalfEdgeGraph g = testutil::from_edges(4, {{0, 0}, {0, 1}, {0, 1}, {1, 2}, {3, 3}});
  DistanceOracle o(g);
  CHECK(o.distance(0, 2) == 2);
  CHECK_FALSE(o.distance(0, 3).has_value());
  CHECK(bfs_distances(g, 3) == std::vector<std::int64_t>{-1, -1, -1, 0});
}

TEST_CASE("bidirectional search agrees with single-source BFS") {
  Rng rng(17);
  const Pmf p = Pmf::from_map({{1, 0.45}, {2, 0.2}, {3, 0.25}, {5, 0.1}});
  for (int t = 0; t < 30; ++t) {
    const DegreeSequence s = sample_iid_degrees(p, 2 + rng.below(400), rng);
    const HalfEdgeGraph g = pair_half_edges(s, rng);
    DistanceOracle o(g);
    for (int q = 0; q < 10; ++q) {
      const auto src = static_cast<Vertex>(rng.below(s.size()));
      const auto ref = bfs_distances(g, src);
      for (std::size_t v = 0; v < s.size(); ++v) {
        const auto d = o.distance(src, static_cast<Vertex>(v));
        const auto back = o.distance(static_cast<Vertex>(v), src);
        CHECK(d == back);
        if (ref[v] < 0) {
          CHECK_FALSE(d.has_value());
        } else {
          CHECK(d == ref[v]);
        }
      }
    }
  }
}

TEST_CASE("sample accounting") {
  Rng rng(3);
  const HalfEdgeGraph g = pair_half_edges(sample_iid_degrees(Pmf::from_map({{1, 0.5}, {3, 0.5}}), 2000, rng), rng);
  const DistanceSample ds = sample_distances(g, 500, rng);
  CHECK(ds.pairs_attempted == 500);
  CHECK(static_cast<std::int64_t>(ds.finite_distances.size()) + ds.infinite_count == 500);
  std::int64_t total = 0;
  for (const auto& [d, c] : ds.histogram()) {
    CHECK(d >= 0);
    total += c;
  }
  CHECK(total == static_cast<std::int64_t>(ds.finite_distances.size()));
  CHECK_THROWS_AS(sample_distances(g, 0, rng), ModelError);

  // o1 == o2 always on a single vertex.
  const DistanceSample one = sample_distances(testutil::from_edges(1, {{0, 0}}), 20, rng);
  CHECK(one.finite_distances == std::vector<std::int64_t>(20, 0));
}

TEST_CASE("scaling report") {
  DistanceSample ds;
  ds.pairs_attempted = 4;
  ds.finite_distances = {2, 4, 6};
  ds.infinite_count = 1;
  const double pred = std::log(100.0) / std::log(2.0);
  const ScalingReport r = scaling_report(ds, 100, 2.0);
  CHECK(r.predicted == doctest::Approx(pred));
  CHECK(r.mean_ratio == doctest::Approx(4.0 / pred));
  CHECK(r.median_ratio == doctest::Approx(4.0 / pred));
  CHECK(r.finite_fraction == doctest::Approx(0.75));
  ds.finite_distances.push_back(10);
  CHECK(scaling_report(ds, 100, 2.0).median_ratio == doctest::Approx(5.0 / pred));
  CHECK_THROWS_AS(scaling_report(ds, 100, 1.0), ModelError);
  CHECK_THROWS_AS(scaling_report(ds, 100, 0.5), ModelError);
  CHECK_THROWS_AS(scaling_report(ds, 2, 2.0), ModelError);
  const ScalingReport empty = scaling_report(DistanceSample{}, 10, 3.0);
  CHECK(empty.mean_ratio == 0.0);
  CHECK(empty.finite_fraction == 0.0);
}

TEST_CASE("typical distances are not much shorter than log n / log nu") {
  // Degrees 1 or 3 with equal weight: nu = 1.5.
  Rng rng(21);
  const std::size_t n = 20000;
  const HalfEdgeGraph g = pair_half_edges(sample_iid_degrees(Pmf::from_map({{1, 0.5}, {3, 0.5}}), n, rng), rng);
  const DistanceSample ds = sample_distances(g, 400, rng);
  const double pred = std::log(double(n)) / std::log(1.5);
  std::size_t short_pairs = 0;
  for (auto d : ds.finite_distances) short_pairs += d > 0 && d < 0.5 * pred;
  CHECK(short_pairs <= ds.finite_distances.size() / 20);
  const ScalingReport r = scaling_report(ds, n, 1.5);
  CHECK(r.mean_ratio > 0.5);
  CHECK(r.mean_ratio < 1.5);
}

TEST_CASE("histogram output") {
  DistanceSample ds;
  ds.pairs_attempted = 5;
  ds.finite_distances = {1, 3, 1, 0};
  ds.infinite_count = 1;
  std::ostringstream os;
  write_distance_histogram(os, ds, 100, 2.5, 7);
  CHECK(os.str() == "# n=100,nu=2.5,seed=7\ndistance,count\n0,1\n1,2\n3,1\ninf,1\n");
  ds.infinite_count = 0;
  std::ostringstream no_inf;
  write_distance_histogram(no_inf, ds, 100, 2.5, 7);
  CHECK(no_inf.str().find("inf") == std::string::npos);
}

}
