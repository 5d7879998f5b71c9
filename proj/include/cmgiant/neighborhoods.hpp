#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmgiant/components.hpp"
#include "cmgiant/graph_build.hpp"
#include "cmgiant/local_limit.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

inline constexpr std::size_t kDefaultBallCap = 1000;
/// Largest color class the canonical coder will permute exhaustively.
inline constexpr std::size_t kMaxTieClass = 8;
/// Cap on the number of orderings tried across all residual classes.
inline constexpr std::uint64_t kMaxTieOrderings = 40320;

/// Rooted radius-r ball: every vertex within distance r of the root and every
/// edge with both ends in that set. Local id 0 is the root.
struct RootedBall {
  std::vector<int> dist;
  /// Unordered pairs, one entry per edge; a loop is (u, u).
  std::vector<std::pair<int, int>> edges;
  int radius = 0;
  std::int64_t boundary_size = 0;
  /// Degree of the root in the host graph. Equal to its in-ball degree when
  /// radius >= 1; at radius 0 it is the only degree information kept.
  Degree root_degree = 0;
  bool oversize = false;

  std::size_t num_vertices() const { return dist.size(); }
};

/// Byte string equal for two balls iff they are isomorphic as rooted
/// multigraphs, within the size and symmetry limits above.
struct CanonicalBall {
  std::string code;

  static const std::string& oversize_code();
  bool oversize() const { return code == oversize_code(); }
  bool tree_shaped() const;
  /// Parenthesized child-list string for tree-shaped balls, empty otherwise.
  std::string tree_string() const;
  auto operator<=>(const CanonicalBall&) const = default;
};

CanonicalBall canonical_code(const RootedBall& ball);

/// Reusable breadth-first ball extraction over one graph.
class BallExtractor {
 public:
  explicit BallExtractor(const HalfEdgeGraph& g, std::size_t cap = kDefaultBallCap);
  RootedBall extract(Vertex v, int r);

 private:
  const HalfEdgeGraph* graph_;
  std::size_t cap_;
  std::vector<std::uint32_t> stamp_;
  std::vector<int> local_;
  std::uint32_t epoch_ = 0;
};

std::pair<RootedBall, CanonicalBall> canonical_ball(const HalfEdgeGraph& g, Vertex v, int r,
                                                    std::size_t cap = kDefaultBallCap);

using BallDistribution = std::map<std::string, double>;
using BallCounts = std::map<std::string, std::int64_t>;

/// Exact fractions over all roots when sample_size is empty, otherwise a
/// Monte Carlo estimate over uniform roots.
BallDistribution empirical_ball_distribution(const HalfEdgeGraph& g, int r,
                                             std::optional<std::size_t> sample_size, Rng& rng,
                                             std::size_t cap = kDefaultBallCap);

/// Depth-r unimodular tree as a rooted ball.
RootedBall sample_bp_ball(const OffspringSpec& spec, int r, Rng& rng,
                          std::size_t cap = kDefaultBallCap);

BallDistribution bp_ball_distribution(const OffspringSpec& spec, int r, std::size_t samples, Rng& rng,
                                      std::size_t cap = kDefaultBallCap);

struct RestrictedBalls {
  BallCounts giant_counts;
  BallCounts non_giant_counts;
  /// Counts divided by n, so giant + non_giant is the unrestricted law.
  BallDistribution giant;
  BallDistribution non_giant;
};

RestrictedBalls restricted_ball_distribution(const HalfEdgeGraph& g, int r, const ComponentSummary& cs,
                                             std::size_t cap = kDefaultBallCap);

double tv_distance(const BallDistribution& a, const BallDistribution& b);

/// FNV-1a, for compact keys in dumps.
std::uint64_t code_hash(const std::string& code);

/// "hash,tree,mass" rows sorted by code.
void write_distribution_csv(std::ostream& os, const BallDistribution& dist);

}  // namespace cmgiant
