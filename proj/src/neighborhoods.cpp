#include "cmgiant/neighborhoods.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace cmgiant {
namespace {

constexpr char kTreeTag[] = "T";
constexpr char kGraphTag[] = "G";

struct BallAdjacency {
  int n = 0;
  std::vector<std::vector<int>> neighbors;  // with multiplicity; a loop appears twice
  std::vector<int> loops;
};

BallAdjacency adjacency_of(const RootedBall& ball) {
  BallAdjacency adj;
  adj.n = static_cast<int>(ball.num_vertices());
  adj.neighbors.resize(adj.n);
  adj.loops.assign(adj.n, 0);
  for (auto [u, v] : ball.edges) {
    adj.neighbors[u].push_back(v);
    adj.neighbors[v].push_back(u);
    if (u == v) ++adj.loops[u];
  }
  return adj;
}

std::vector<int> bfs_distances(const BallAdjacency& adj) {
  std::vector<int> dist(adj.n, -1);
  std::vector<int> queue{0};
  dist[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int u = queue[h];
    for (int w : adj.neighbors[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

// Rooted-tree code: "(" + sorted child codes + ")".
std::string tree_code(const BallAdjacency& adj, const std::vector<int>& dist) {
  std::vector<int> order(adj.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  std::vector<std::string> code(adj.n);
  std::vector<std::string> kids;
  for (int v : order) {
    kids.clear();
    for (int w : adj.neighbors[v]) {
      if (dist[w] == dist[v] + 1) kids.push_back(std::move(code[w]));
    }
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    s += ')';
    code[v] = std::move(s);
  }
  return code[0];
}

// Ranks of keys, equal keys sharing a rank, ordered by key.
template <class Key>
std::vector<int> rank_keys(const std::vector<Key>& keys, int* distinct) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size(), 0);
  int r = -1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i == 0 || keys[idx[i - 1]] < keys[idx[i]]) ++r;
    rank[idx[i]] = r;
  }
  *distinct = r + 1;
  return rank;
}

std::uint64_t factorial(std::size_t k) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

// Color refinement seeded by (distance, in-ball degree, loops), then the
// lexicographically least multiplicity matrix over all orderings that respect
// the stable coloring.
std::string graph_code(const BallAdjacency& adj, const std::vector<int>& dist) {
  const int n = adj.n;
  std::vector<int> mult(static_cast<std::size_t>(n) * n, 0);
  for (int u = 0; u < n; ++u) {
    for (int w : adj.neighbors[u]) {
      if (w != u) ++mult[u * n + w];
    }
    mult[u * n + u] = adj.loops[u];
  }

  using Seed = std::array<int, 3>;
  std::vector<Seed> seeds(n);
  for (int v = 0; v < n; ++v) {
    seeds[v] = {dist[v], static_cast<int>(adj.neighbors[v].size()), adj.loops[v]};
  }
  int classes = 0;
  std::vector<int> color = rank_keys(seeds, &classes);
  for (;;) {
    std::vector<std::vector<int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, int>> around;
      for (int u = 0; u < n; ++u) {
        if (u != v && mult[v * n + u] > 0) around.emplace_back(color[u], mult[v * n + u]);
      }
      std::sort(around.begin(), around.end());
      sig[v].push_back(color[v]);
      for (auto [c, m] : around) {
        sig[v].push_back(c);
        sig[v].push_back(m);
      }
    }
    int next_classes = 0;
    std::vector<int> next = rank_keys(sig, &next_classes);
    color.swap(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }

  std::vector<std::vector<int>> cells(classes);
  for (int v = 0; v < n; ++v) cells[color[v]].push_back(v);
  std::uint64_t orderings = 1;
  for (const auto& cell : cells) {
    if (cell.size() > kMaxTieClass) return CanonicalBall::oversize_code();
    orderings *= factorial(cell.size());
    if (orderings > kMaxTieOrderings) return CanonicalBall::oversize_code();
  }

  std::vector<int> best;
  std::vector<int> order(n);
  std::vector<int> enc;
  enc.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (;;) {
    std::size_t pos = 0;
    for (const auto& cell : cells) {
      for (int v : cell) order[pos++] = v;
    }
    enc.clear();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) enc.push_back(mult[order[i] * n + order[j]]);
    }
    if (best.empty() || enc < best) best = enc;
    // Odometer over the per-cell permutations.
    std::size_t c = 0;
    for (; c < cells.size(); ++c) {
      if (std::next_permutation(cells[c].begin(), cells[c].end())) break;
    }
    if (c == cells.size()) break;
  }

  std::string out = std::to_string(n) + ":";
  for (const auto& cell : cells) {
    const Seed& s = seeds[cell.front()];
    out += std::to_string(cell.size()) + "x" + std::to_string(s[0]) + "." + std::to_string(s[1]) + "." +
           std::to_string(s[2]) + "/";
  }
  out += '|';
  for (std::size_t i = 0; i < best.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(best[i]);
  }
  return out;
}

}  // namespace

const std::string& CanonicalBall::oversize_code() {
  static const std::string code = "!oversize";
  return code;
}

bool CanonicalBall::tree_shaped() const {
  const auto semi = code.find(';');
  return semi != std::string::npos && code.compare(semi + 1, 1, kTreeTag) == 0;
}

std::string CanonicalBall::tree_string() const {
  if (!tree_shaped()) return {};
  return code.substr(code.find(';') + 2);
}

CanonicalBall canonical_code(const RootedBall& ball) {
  if (ball.oversize || ball.num_vertices() == 0) return {CanonicalBall::oversize_code()};
  const BallAdjacency adj = adjacency_of(ball);
  const std::vector<int> dist = bfs_distances(adj);
  std::string prefix = "d" + std::to_string(ball.root_degree) + ";";
  if (ball.edges.size() + 1 == ball.num_vertices()) {
    return {prefix + kTreeTag + tree_code(adj, dist)};
  }
  std::string body = graph_code(adj, dist);
  if (body == CanonicalBall::oversize_code()) return {body};
  return {prefix + kGraphTag + body};
}

BallExtractor::BallExtractor(const HalfEdgeGraph& g, std::size_t cap)
    : graph_(&g), cap_(cap), stamp_(g.num_vertices(), 0), local_(g.num_vertices(), -1) {}

RootedBall BallExtractor::extract(Vertex v, int r) {
  const HalfEdgeGraph& g = *graph_;
  RootedBall ball;
  ball.radius = r;
  ball.root_degree = g.degree(v);
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::vector<Vertex> members{v};
  stamp_[v] = epoch_;
  local_[v] = 0;
  ball.dist.push_back(0);
  for (std::size_t h = 0; h < members.size(); ++h) {
    const Vertex u = members[h];
    const int du = ball.dist[h];
    if (du == r) continue;
    const HalfEdge end = g.first_half_edge(u) + g.degree(u);
    for (HalfEdge x = g.first_half_edge(u); x < end; ++x) {
      const Vertex w = g.neighbor(x);
      if (stamp_[w] == epoch_) continue;
      stamp_[w] = epoch_;
      local_[w] = static_cast<int>(members.size());
      members.push_back(w);
      ball.dist.push_back(du + 1);
      if (members.size() > cap_) {
        ball.oversize = true;
        return ball;
      }
    }
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Vertex u = members[i];
    const HalfEdge end = g.first_half_edge(u) + g.degree(u);
    for (HalfEdge x = g.first_half_edge(u); x < end; ++x) {
      const HalfEdge y = g.mate(x);
      if (x > y) continue;
      const Vertex w = g.owner(y);
      if (stamp_[w] == epoch_) ball.edges.emplace_back(static_cast<int>(i), local_[w]);
    }
    if (ball.dist[i] == r) ++ball.boundary_size;
  }
  return ball;
}

std::pair<RootedBall, CanonicalBall> canonical_ball(const HalfEdgeGraph& g, Vertex v, int r,
                                                    std::size_t cap) {
  if (r < 0) throw ModelError("canonical_ball: r must be >= 0");
  BallExtractor extractor(g, cap);
  RootedBall ball = extractor.extract(v, r);
  CanonicalBall code = canonical_code(ball);
  return {std::move(ball), std::move(code)};
}

namespace {

BallDistribution normalize(const BallCounts& counts, double total) {
  BallDistribution out;
  for (const auto& [code, c] : counts) out.emplace(code, static_cast<double>(c) / total);
  return out;
}

}  // namespace

BallDistribution empirical_ball_distribution(const HalfEdgeGraph& g, int r,
                                             std::optional<std::size_t> sample_size, Rng& rng,
                                             std::size_t cap) {
  if (r < 0) throw ModelError("empirical_ball_distribution: r must be >= 0");
  BallExtractor extractor(g, cap);
  BallCounts counts;
  const std::size_t n = g.num_vertices();
  if (!sample_size) {
    for (std::size_t v = 0; v < n; ++v) {
      ++counts[canonical_code(extractor.extract(static_cast<Vertex>(v), r)).code];
    }
    return normalize(counts, static_cast<double>(n));
  }
  if (*sample_size == 0) throw ModelError("empirical_ball_distribution: sample size must be positive");
  for (std::size_t s = 0; s < *sample_size; ++s) {
    const auto v = static_cast<Vertex>(rng.below(n));
    ++counts[canonical_code(extractor.extract(v, r)).code];
  }
  return normalize(counts, static_cast<double>(*sample_size));
}

RootedBall sample_bp_ball(const OffspringSpec& spec, int r, Rng& rng, std::size_t cap) {
  if (r < 0) throw ModelError("sample_bp_ball: r must be >= 0");
  RootedBall ball;
  ball.radius = r;
  const auto root_children = static_cast<Degree>(spec.root_pmf.sample(rng));
  ball.root_degree = root_children;
  ball.dist.push_back(0);
  if (r == 0) {
    ball.boundary_size = 1;
    return ball;
  }
  for (std::size_t h = 0; h < ball.dist.size(); ++h) {
    const int dh = ball.dist[h];
    if (dh == r) continue;
    const std::int64_t kids = h == 0 ? root_children : spec.shifted_pmf.sample(rng);
    for (std::int64_t c = 0; c < kids; ++c) {
      const int id = static_cast<int>(ball.dist.size());
      ball.dist.push_back(dh + 1);
      ball.edges.emplace_back(static_cast<int>(h), id);
      if (ball.dist.size() > cap) {
        ball.oversize = true;
        return ball;
      }
    }
  }
  ball.boundary_size = std::count(ball.dist.begin(), ball.dist.end(), r);
  return ball;
}

BallDistribution bp_ball_distribution(const OffspringSpec& spec, int r, std::size_t samples, Rng& rng,
                                      std::size_t cap) {
  if (samples == 0) throw ModelError("bp_ball_distribution: samples must be positive");
  BallCounts counts;
  for (std::size_t s = 0; s < samples; ++s) ++counts[canonical_code(sample_bp_ball(spec, r, rng, cap)).code];
  return normalize(counts, static_cast<double>(samples));
}

RestrictedBalls restricted_ball_distribution(const HalfEdgeGraph& g, int r, const ComponentSummary& cs,
                                             std::size_t cap) {
  if (r < 0) throw ModelError("restricted_ball_distribution: r must be >= 0");
  BallExtractor extractor(g, cap);
  RestrictedBalls out;
  const std::size_t n = g.num_vertices();
  for (std::size_t v = 0; v < n; ++v) {
    const auto vertex = static_cast<Vertex>(v);
    std::string code = canonical_code(extractor.extract(vertex, r)).code;
    ++(cs.in_giant(vertex) ? out.giant_counts : out.non_giant_counts)[std::move(code)];
  }
  out.giant = normalize(out.giant_counts, static_cast<double>(n));
  out.non_giant = normalize(out.non_giant_counts, static_cast<double>(n));
  return out;
}

double tv_distance(const BallDistribution& a, const BallDistribution& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

std::uint64_t code_hash(const std::string& code) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : code) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_distribution_csv(std::ostream& os, const BallDistribution& dist) {
  os << "hash,tree,mass\n";
  const auto flags = os.flags();
  for (const auto& [code, mass] : dist) {
    const CanonicalBall ball{code};
    os << std::hex << std::setw(16) << std::setfill('0') << code_hash(code) << std::dec << std::setfill(' ')
       << ',' << ball.tree_string() << ',' << std::setprecision(17) << mass << '\n';
  }
  os.flags(flags);
}

}  // namespace cmgiant
