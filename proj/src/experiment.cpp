#include "cmgiant/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "cmgiant/components.hpp"
#include "cmgiant/coupling.hpp"
#include "cmgiant/distances.hpp"
#include "cmgiant/graph_build.hpp"
#include "cmgiant/neighborhoods.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::giant, "giant"},
    {ExperimentKind::structure, "structure"},
    {ExperimentKind::almost_local, "almost_local"},
    {ExperimentKind::necessity_demo, "necessity_demo"},
    {ExperimentKind::local_conv, "local_conv"},
    {ExperimentKind::coupling, "coupling"},
    {ExperimentKind::distances, "distances"},
    {ExperimentKind::p2_demo, "p2_demo"},
    {ExperimentKind::truncation, "truncation"},
};

// Stream purposes for split_seed; fixed forever so outputs stay reproducible.
enum Stream : std::uint64_t {
  kDegrees = 1,
  kPairing = 2,
  kSecondDegrees = 3,
  kSecondPairing = 4,
  kSampling = 5,
  kBranching = 6,
  kCoupling = 7,
};

Rng stream(std::uint64_t seed, std::size_t n, Stream purpose) {
  return Rng(split_seed(seed, static_cast<std::uint64_t>(n), purpose));
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

template <class T>
std::vector<T> int_list(const json& j, const std::string& field, T min_value) {
  std::vector<T> out;
  auto take = [&](const json& e) {
    if (!e.is_number_integer()) field_error(field, "expected an integer or a list of integers");
    const auto v = e.get<std::int64_t>();
    if (v < static_cast<std::int64_t>(min_value)) {
      field_error(field, "values must be >= " + std::to_string(static_cast<std::int64_t>(min_value)));
    }
    out.push_back(static_cast<T>(v));
  };
  if (j.is_array()) {
    for (const auto& e : j) take(e);
  } else {
    take(j);
  }
  if (out.empty()) field_error(field, "list must not be empty");
  return out;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

Pmf pmf_from_json(const json& j) {
  if (!j.is_object()) field_error("degree_model.pmf", "expected an object mapping degree to probability");
  std::map<std::int64_t, double> masses;
  for (const auto& [key, value] : j.items()) {
    std::int64_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::logic_error&) {
      field_error("degree_model.pmf", "key '" + key + "' is not an integer");
    }
    if (!value.is_number()) field_error("degree_model.pmf", "value for '" + key + "' is not a number");
    masses[k] = value.get<double>();
  }
  try {
    return Pmf::from_map(masses);
  } catch (const ModelError& e) {
    field_error("degree_model.pmf", e.what());
  }
}

ordered_json pmf_to_json(const Pmf& pmf) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < pmf.size(); ++i) j[std::to_string(pmf.support()[i])] = pmf.probabilities()[i];
  return j;
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Replicates

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<double> theory;
};

struct Replicate {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics;
  /// (file name, content) dumps; written by the single output writer.
  std::vector<std::pair<std::string, std::string>> files;
  /// Appended, in replicate order, to a shared file.
  std::string trace_lines;
};

class Context {
 public:
  explicit Context(const ExperimentConfig& cfg) : cfg_(cfg) {
    if (cfg.sequence_path) {
      std::ifstream in(*cfg.sequence_path);
      if (!in) throw ConfigError("cannot open degree sequence " + cfg.sequence_path->string());
      try {
        fixed_ = read_degrees(in);
      } catch (const ModelError& e) {
        throw ConfigError(std::string("degree sequence: ") + e.what());
      }
    }
    const Pmf law = cfg.pmf ? *cfg.pmf : empirical_distribution(*fixed_);
    try {
      spec_ = build_offspring_spec(law);
    } catch (const DegenerateTwoRegularError&) {
      // p2_demo: no limit object exists.
    }
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  const std::optional<OffspringSpec>& spec() const { return spec_; }

  DegreeSequence degrees(std::size_t n, Rng& rng) const {
    if (fixed_) return *fixed_;
    return sample_iid_degrees(*cfg_.pmf, n, rng);
  }

  std::vector<std::size_t> n_values() const {
    if (fixed_) return {fixed_->size()};
    return cfg_.n_values;
  }

 private:
  const ExperimentConfig& cfg_;
  std::optional<DegreeSequence> fixed_;
  std::optional<OffspringSpec> spec_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw InvariantViolation(what);
}

void check_summary(const ComponentSummary& cs, const HalfEdgeGraph& g) {
  const auto total = std::accumulate(cs.sizes.begin(), cs.sizes.end(), std::int64_t{0});
  check(static_cast<std::size_t>(total) == g.num_vertices(), "cluster sizes do not sum to n");
  check(std::is_sorted(cs.sizes.rbegin(), cs.sizes.rend()), "cluster sizes are not non-increasing");
  const auto edges = std::accumulate(cs.edges.begin(), cs.edges.end(), std::int64_t{0});
  check(static_cast<std::size_t>(edges) == g.num_edges(), "cluster edge counts do not sum to ell/2");
  // Upper bound on the giant: |C_max| <= Z_{>=k} whenever |C_max| >= k.
  for (std::int64_t k : {std::int64_t{1}, std::int64_t{10}, std::int64_t{100}, std::int64_t{1000}}) {
    if (k <= cs.sizes[0]) check(cs.sizes[0] <= cs.vertices_in_clusters_at_least(k), "giant exceeds Z_{>=k}");
  }
}

void add_giant_metrics(Replicate& rep, const Context& ctx, const ComponentSummary& cs, std::size_t n) {
  const GiantStatistics gs = giant_statistics(cs, n);
  std::optional<TheoreticalGiant> th;
  if (ctx.spec()) th = theoretical_giant(*ctx.spec());
  auto theory = [&](auto pick) -> std::optional<double> {
    if (!th) return std::nullopt;
    return pick(*th);
  };
  rep.metrics.push_back({"gmax_frac", gs.gmax_frac, theory([](const TheoreticalGiant& t) { return t.zeta; })});
  rep.metrics.push_back({"second_frac", gs.second_frac, theory([](const TheoreticalGiant&) { return 0.0; })});
  rep.metrics.push_back({"edge_frac", gs.edge_frac, theory([](const TheoreticalGiant& t) { return t.edge_limit; })});
  if (ctx.spec()) {
    for (std::int64_t k : ctx.spec()->root_pmf.support()) {
      const auto it = gs.vk_frac.find(static_cast<Degree>(k));
      const double v = it == gs.vk_frac.end() ? 0.0 : it->second;
      rep.metrics.push_back({"v" + std::to_string(k) + "_frac", v, th->vk_limit.at(k)});
    }
  }
  const double z2 = ctx.spec() ? ctx.spec()->zeta * ctx.spec()->zeta : 0.0;
  const std::optional<double> z2_theory = ctx.spec() ? std::optional<double>(z2) : std::nullopt;
  bool first = true;
  for (std::int64_t k : ctx.cfg().k_values) {
    const SumSquares ss = sum_squares_ratio(cs, k, n);
    if (first) rep.metrics.push_back({"sum_squares_all", ss.all, z2_theory});
    first = false;
    rep.metrics.push_back({"sum_squares_k" + std::to_string(k), ss.large_only, z2_theory});
  }
}

Replicate run_giant(const Context& ctx, std::size_t n, std::uint64_t seed, bool with_structure) {
  Replicate rep{n, seed, {}, {}, {}};
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  const HalfEdgeGraph g = pair_half_edges(ctx.degrees(n, deg_rng), pair_rng);
  const ComponentSummary cs = component_decomposition(g);
  check_summary(cs, g);
  add_giant_metrics(rep, ctx, cs, n);
  if (with_structure) {
    const RestrictedBalls rb = restricted_ball_distribution(g, 0, cs);
    std::map<std::int64_t, double> giant_by_degree;
    std::map<std::int64_t, double> rest_by_degree;
    auto degree_of = [](const std::string& code) { return std::stoll(code.substr(1, code.find(';') - 1)); };
    for (const auto& [code, mass] : rb.giant) giant_by_degree[degree_of(code)] += mass;
    for (const auto& [code, mass] : rb.non_giant) rest_by_degree[degree_of(code)] += mass;
    if (ctx.spec()) {
      const auto& spec = *ctx.spec();
      for (std::int64_t k : spec.root_pmf.support()) {
        const double pk = spec.root_pmf.at(k);
        const double xik = std::pow(spec.xi, static_cast<double>(k));
        rep.metrics.push_back({"giant_root_deg" + std::to_string(k) + "_mass", giant_by_degree[k], pk * (1.0 - xik)});
        rep.metrics.push_back({"non_giant_root_deg" + std::to_string(k) + "_mass", rest_by_degree[k], pk * xik});
      }
    }
  }
  return rep;
}

Replicate run_almost_local(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  const HalfEdgeGraph g = pair_half_edges(ctx.degrees(n, deg_rng), pair_rng);
  const ComponentSummary cs = component_decomposition(g);
  check_summary(cs, g);
  const auto zeta = ctx.spec() ? std::optional<double>(ctx.spec()->zeta) : std::nullopt;
  rep.metrics.push_back({"gmax_frac", giant_statistics(cs, n).gmax_frac, zeta});
  for (std::int64_t k : ctx.cfg().k_values) {
    rep.metrics.push_back({"disconnected_pair_fraction_k" + std::to_string(k), disconnected_pair_fraction(cs, k, n), std::nullopt});
  }
  for (int r : ctx.cfg().r_values) {
    rep.metrics.push_back({"boundary_pair_fraction_r" + std::to_string(r), boundary_pair_fraction(g, cs, r), std::nullopt});
  }
  const SumSquares ss = sum_squares_ratio(cs, 1, n);
  rep.metrics.push_back({"sum_squares_all", ss.all, zeta ? std::optional<double>(*zeta * *zeta) : std::nullopt});
  return rep;
}

Replicate run_necessity(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  const std::size_t half = n / 2;
  if (half == 0) throw ConfigError("necessity_demo: n must be >= 2");
  Rng deg1 = stream(seed, n, kDegrees);
  Rng pair1 = stream(seed, n, kPairing);
  Rng deg2 = stream(seed, n, kSecondDegrees);
  Rng pair2 = stream(seed, n, kSecondPairing);
  const HalfEdgeGraph a = pair_half_edges(ctx.degrees(half, deg1), pair1);
  const HalfEdgeGraph b = pair_half_edges(ctx.degrees(n - half, deg2), pair2);
  const HalfEdgeGraph g = HalfEdgeGraph::disjoint_union(a, b);
  const ComponentSummary cs = component_decomposition(g);
  check_summary(cs, g);
  const std::size_t total = g.num_vertices();
  const auto zeta = ctx.spec() ? ctx.spec()->zeta : 0.0;
  rep.metrics.push_back({"gmax_frac", giant_statistics(cs, total).gmax_frac, zeta / 2.0});
  for (std::int64_t k : ctx.cfg().k_values) {
    rep.metrics.push_back({"disconnected_pair_fraction_k" + std::to_string(k), disconnected_pair_fraction(cs, k, total),
                           std::nullopt});
  }
  for (int r : ctx.cfg().r_values) {
    rep.metrics.push_back({"boundary_pair_fraction_r" + std::to_string(r), boundary_pair_fraction(g, cs, r), std::nullopt});
  }
  return rep;
}

std::string distribution_csv(const BallDistribution& d) {
  std::ostringstream os;
  write_distribution_csv(os, d);
  return os.str();
}

Replicate run_local_conv(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  if (!ctx.spec()) throw ConfigError("local_conv: degree law has no branching-process limit");
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  Rng sample_rng = stream(seed, n, kSampling);
  Rng bp_rng = stream(seed, n, kBranching);
  const HalfEdgeGraph g = pair_half_edges(ctx.degrees(n, deg_rng), pair_rng);
  for (int r : ctx.cfg().r_values) {
    const BallDistribution emp = empirical_ball_distribution(g, r, std::nullopt, sample_rng);
    const BallDistribution bp = bp_ball_distribution(*ctx.spec(), r, ctx.cfg().bp_samples, bp_rng);
    rep.metrics.push_back({"tv_r" + std::to_string(r), tv_distance(emp, bp), 0.0});
    const std::string tag = "_n" + std::to_string(n) + "_s" + std::to_string(seed) + "_r" + std::to_string(r) + ".csv";
    rep.files.emplace_back("balls" + tag, distribution_csv(emp));
    rep.files.emplace_back("bp_balls" + tag, distribution_csv(bp));
  }
  return rep;
}

Replicate run_coupling(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng rng = stream(seed, n, kCoupling);
  const DegreeSequence seq = ctx.degrees(n, deg_rng);
  const auto m = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), ctx.cfg().m_exponent)));
  const ReuseBounds bounds = reuse_bounds(n, seq.total_degree(), seq.max_degree(), std::max<std::int64_t>(m, 1));
  CouplingExplorer explorer(seq);
  const auto o1 = static_cast<Vertex>(rng.below(seq.size()));
  const auto o2 = static_cast<Vertex>(rng.below(seq.size()));
  const CouplingTrace t1 = explorer.explore(o1, std::max<std::int64_t>(m, 1), rng);
  const CouplingTrace t2 = explorer.explore(o2, std::max<std::int64_t>(m, 1), rng);
  for (const CouplingTrace* t : {&t1, &t2}) {
    const std::size_t stop = t->first_divergence.value_or(t->steps.size());
    for (std::size_t i = 0; i < stop; ++i) {
      check(t->steps[i].graph_children == t->steps[i].bp_children, "coupling differs before the first event");
    }
  }
  rep.metrics.push_back({"half_edge_reuses", static_cast<double>(t1.half_edge_reuses), bounds.half_edge_bound});
  rep.metrics.push_back({"vertex_reuses", static_cast<double>(t1.vertex_reuses), bounds.vertex_bound});
  rep.metrics.push_back({"diverged", t1.diverged() ? 1.0 : 0.0, bounds.half_edge_bound + bounds.vertex_bound});
  rep.metrics.push_back({"bp_total_root1", static_cast<double>(t1.bp_total), std::nullopt});
  rep.metrics.push_back({"bp_total_root2", static_cast<double>(t2.bp_total), std::nullopt});
  rep.metrics.push_back({"graph_total_root1", static_cast<double>(t1.graph_total), std::nullopt});
  std::ostringstream os;
  write_trace_jsonl(os, t1);
  write_trace_jsonl(os, t2);
  std::istringstream lines(os.str());
  std::string line;
  while (std::getline(lines, line)) {
    // Tag each step with the replicate it belongs to.
    rep.trace_lines += "{\"n\":" + std::to_string(n) + ",\"seed\":" + std::to_string(seed) + "," + line.substr(1) + "\n";
  }
  return rep;
}

Replicate run_distances(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  if (!ctx.spec() || !ctx.spec()->supercritical()) {
    throw ConfigError("distances: degree law must be supercritical (nu > 1)");
  }
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  Rng sample_rng = stream(seed, n, kSampling);
  const HalfEdgeGraph g = pair_half_edges(ctx.degrees(n, deg_rng), pair_rng);
  const DistanceSample ds = sample_distances(g, ctx.cfg().pairs, sample_rng);
  check(ds.pairs_attempted == static_cast<std::int64_t>(ds.finite_distances.size()) + ds.infinite_count,
        "distance sample does not account for every pair");
  const double nu = ctx.spec()->nu;
  const ScalingReport sr = scaling_report(ds, g.num_vertices(), nu);
  const double zeta = ctx.spec()->zeta;
  rep.metrics.push_back({"mean_ratio", sr.mean_ratio, 1.0});
  rep.metrics.push_back({"median_ratio", sr.median_ratio, 1.0});
  rep.metrics.push_back({"finite_fraction", sr.finite_fraction, zeta * zeta});
  rep.metrics.push_back({"mean_distance", sr.mean_ratio * sr.predicted, sr.predicted});
  std::ostringstream os;
  write_distance_histogram(os, ds, g.num_vertices(), nu, seed);
  rep.files.emplace_back("distances_n" + std::to_string(n) + "_s" + std::to_string(seed) + ".csv", os.str());
  return rep;
}

Replicate run_p2(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  const HalfEdgeGraph g = pair_half_edges(ctx.degrees(n, deg_rng), pair_rng);
  const ComponentSummary cs = component_decomposition(g);
  check_summary(cs, g);
  const GiantStatistics gs = giant_statistics(cs, n);
  rep.metrics.push_back({"gmax_frac", gs.gmax_frac, std::nullopt});
  rep.metrics.push_back({"second_frac", gs.second_frac, std::nullopt});
  rep.metrics.push_back({"num_clusters", static_cast<double>(cs.num_clusters()), std::nullopt});
  return rep;
}

Replicate run_truncation(const Context& ctx, std::size_t n, std::uint64_t seed) {
  Replicate rep{n, seed, {}, {}, {}};
  Rng deg_rng = stream(seed, n, kDegrees);
  Rng pair_rng = stream(seed, n, kPairing);
  Rng sample_rng = stream(seed, n, kSampling);
  const DegreeSequence seq = ctx.degrees(n, deg_rng);
  for (Degree b : ctx.cfg().b_values) {
    const ExplosionMap map = truncate_explode(seq, b);
    const CoupledGraphs cg = coupled_pairing(map, pair_rng);
    std::int64_t violations = 0;
    // (a) truncated degrees, exploded vertices of degree 1.
    std::int64_t surplus = 0;
    for (std::size_t v = 0; v < seq.size(); ++v) {
      surplus += std::max(0, seq[v] - b);
      if (map.truncated_degrees[v] != std::min(seq[v], b)) ++violations;
    }
    if (map.truncated_degrees.size() != seq.size() + static_cast<std::size_t>(surplus)) ++violations;
    for (std::size_t v = seq.size(); v < map.truncated_degrees.size(); ++v) {
      if (map.truncated_degrees[v] != 1) ++violations;
    }
    // (b) total degree preserved.
    if (map.truncated_degrees.total_degree() != seq.total_degree()) ++violations;
    // (c) connected in the truncated model implies connected in the original.
    const ComponentSummary orig = component_decomposition(cg.original);
    const ComponentSummary trunc = component_decomposition(cg.truncated);
    std::vector<std::int32_t> image(trunc.num_clusters(), -1);
    for (std::size_t v = 0; v < seq.size(); ++v) {
      auto& slot = image[trunc.cluster_of[v]];
      if (slot < 0) {
        slot = orig.cluster_of[v];
      } else if (slot != orig.cluster_of[v]) {
        ++violations;
      }
    }
    for (int i = 0; i < 1000; ++i) {
      const auto u = static_cast<Vertex>(sample_rng.below(seq.size()));
      const auto w = static_cast<Vertex>(sample_rng.below(seq.size()));
      if (trunc.cluster_of[u] == trunc.cluster_of[w] && orig.cluster_of[u] != orig.cluster_of[w]) ++violations;
    }
    const std::string tag = "_b" + std::to_string(b);
    rep.metrics.push_back({"violations" + tag, static_cast<double>(violations), 0.0});
    rep.metrics.push_back({"exploded" + tag, static_cast<double>(map.exploded_count()), std::nullopt});
    rep.metrics.push_back({"truncated_gmax_frac" + tag,
                           static_cast<double>(trunc.sizes[0]) / static_cast<double>(cg.truncated.num_vertices()),
                           std::nullopt});
    check(violations == 0, "degree truncation coupling violated at b=" + std::to_string(b));
  }
  return rep;
}

Replicate run_one(const Context& ctx, std::size_t n, std::uint64_t seed) {
  switch (ctx.cfg().experiment) {
    case ExperimentKind::giant: return run_giant(ctx, n, seed, false);
    case ExperimentKind::structure: return run_giant(ctx, n, seed, true);
    case ExperimentKind::almost_local: return run_almost_local(ctx, n, seed);
    case ExperimentKind::necessity_demo: return run_necessity(ctx, n, seed);
    case ExperimentKind::local_conv: return run_local_conv(ctx, n, seed);
    case ExperimentKind::coupling: return run_coupling(ctx, n, seed);
    case ExperimentKind::distances: return run_distances(ctx, n, seed);
    case ExperimentKind::p2_demo: return run_p2(ctx, n, seed);
    case ExperimentKind::truncation: return run_truncation(ctx, n, seed);
  }
  throw ConfigError("unknown experiment");
}

std::string summary_csv(const ExperimentConfig& cfg, const std::vector<Replicate>& reps) {
  struct Acc {
    std::vector<double> values;
    std::optional<double> theory;
  };
  // Rows ordered by n, then by first appearance of the metric.
  std::map<std::size_t, std::vector<std::string>> order;
  std::map<std::pair<std::size_t, std::string>, Acc> acc;
  for (const auto& rep : reps) {
    for (const auto& m : rep.metrics) {
      auto [it, fresh] = acc.try_emplace({rep.n, m.name});
      if (fresh) {
        order[rep.n].push_back(m.name);
        it->second.theory = m.theory;
      }
      it->second.values.push_back(m.value);
    }
  }
  std::ostringstream os;
  os << "experiment,n,metric,mean,stddev,count,theory\n";
  for (const auto& [n, names] : order) {
    for (const auto& name : names) {
      const Acc& a = acc.at({n, name});
      const auto cnt = static_cast<double>(a.values.size());
      const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / cnt;
      double ss = 0.0;
      for (double v : a.values) ss += (v - mean) * (v - mean);
      const double sd = a.values.size() > 1 ? std::sqrt(ss / (cnt - 1.0)) : 0.0;
      os << to_string(cfg.experiment) << ',' << n << ',' << name << ',' << fmt(mean) << ',' << fmt(sd) << ','
         << a.values.size() << ',' << (a.theory ? fmt(*a.theory) : "") << '\n';
    }
  }
  return os.str();
}

std::string records_jsonl(const ExperimentConfig& cfg, const std::vector<Replicate>& reps) {
  std::string out;
  for (const auto& rep : reps) {
    ordered_json rec;
    rec["experiment"] = to_string(cfg.experiment);
    rec["n"] = rep.n;
    rec["seed"] = rep.seed;
    ordered_json metrics = ordered_json::object();
    for (const auto& m : rep.metrics) metrics[m.name] = m.value;
    rec["metrics"] = std::move(metrics);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [k, name] : kKindNames) v.push_back(k);
    return v;
  }();
  return kinds;
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["experiment"] = to_string(experiment);
  if (pmf) {
    j["degree_model"] = {{"pmf", pmf_to_json(*pmf)}};
  } else if (sequence_path) {
    j["degree_model"] = {{"sequence", sequence_path->string()}};
  }
  j["n"] = n_values;
  j["seeds"] = seeds;
  j["k"] = k_values;
  j["r"] = r_values;
  j["b"] = b_values;
  j["alpha"] = alpha;
  j["delta"] = delta;
  j["m_exponent"] = m_exponent;
  j["pairs"] = pairs;
  j["bp_samples"] = bp_samples;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  static const std::vector<std::string> known = {"experiment", "degree_model", "n", "seeds", "k", "r", "b",
                                                  "alpha", "delta", "m_exponent", "pairs", "bp_samples",
                                                  "threads", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) field_error(key, "unknown field");
  }
  ExperimentConfig cfg;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) field_error("experiment", "expected a string");
    const auto kind = parse_experiment_kind(j["experiment"].get<std::string>());
    if (!kind) field_error("experiment", "unknown experiment '" + j["experiment"].get<std::string>() + "'");
    cfg.experiment = *kind;
  }
  if (j.contains("degree_model")) {
    const json& dm = j["degree_model"];
    if (!dm.is_object() || dm.size() != 1) {
      field_error("degree_model", "expected exactly one of 'pmf', 'pmf_csv', 'sequence'");
    }
    if (dm.contains("pmf")) {
      cfg.pmf = pmf_from_json(dm["pmf"]);
    } else if (dm.contains("pmf_csv")) {
      if (!dm["pmf_csv"].is_string()) field_error("degree_model.pmf_csv", "expected a path string");
      const fs::path p = dm["pmf_csv"].get<std::string>();
      std::ifstream in(p);
      if (!in) field_error("degree_model.pmf_csv", "cannot open " + p.string());
      try {
        cfg.pmf = read_pmf_csv(in);
      } catch (const ModelError& e) {
        field_error("degree_model.pmf_csv", e.what());
      }
    } else if (dm.contains("sequence")) {
      if (!dm["sequence"].is_string()) field_error("degree_model.sequence", "expected a path string");
      cfg.sequence_path = fs::path(dm["sequence"].get<std::string>());
    } else {
      field_error("degree_model", "expected exactly one of 'pmf', 'pmf_csv', 'sequence'");
    }
  }
  if (j.contains("n")) cfg.n_values = int_list<std::size_t>(j["n"], "n", 1);
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    if (s.is_number_integer()) {
      const auto count = s.get<std::int64_t>();
      if (count < 1) field_error("seeds", "seed count must be >= 1");
      cfg.seeds.resize(static_cast<std::size_t>(count));
      std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{0});
    } else if (s.is_array()) {
      cfg.seeds = int_list<std::uint64_t>(s, "seeds", 0);
    } else {
      field_error("seeds", "expected a count or a list of seeds");
    }
  }
  if (j.contains("k")) cfg.k_values = int_list<std::int64_t>(j["k"], "k", 1);
  if (j.contains("r")) cfg.r_values = int_list<int>(j["r"], "r", 0);
  if (j.contains("b")) cfg.b_values = int_list<Degree>(j["b"], "b", 1);
  if (j.contains("alpha")) cfg.alpha = number(j["alpha"], "alpha");
  if (j.contains("delta")) cfg.delta = number(j["delta"], "delta");
  if (j.contains("m_exponent")) cfg.m_exponent = number(j["m_exponent"], "m_exponent");
  if (j.contains("pairs")) cfg.pairs = int_list<std::size_t>(j["pairs"], "pairs", 1).front();
  if (j.contains("bp_samples")) cfg.bp_samples = int_list<std::size_t>(j["bp_samples"], "bp_samples", 1).front();
  if (j.contains("threads")) cfg.threads = int_list<std::size_t>(j["threads"], "threads", 1).front();
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) field_error("output_dir", "expected a path string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "line L, column C" in the message.
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (!pmf && !sequence_path) field_error("degree_model", "missing");
  if (pmf && pmf->min_value() < 1) field_error("degree_model.pmf", "degree 0 has positive mass");
  if (sequence_path && !fs::exists(*sequence_path)) {
    field_error("degree_model.sequence", "file " + sequence_path->string() + " does not exist");
  }
  if (!sequence_path && n_values.empty()) field_error("n", "at least one n is required");
  if (seeds.empty()) field_error("seeds", "at least one seed is required");
  if (!(alpha > 0.5 && alpha < 1.0)) field_error("alpha", "must lie in (1/2, 1)");
  if (!(delta > 0.0)) field_error("delta", "must be positive");
  if (!(m_exponent > 0.0 && m_exponent < 1.0)) field_error("m_exponent", "must lie in (0, 1)");
  if (threads == 0) field_error("threads", "must be >= 1");
  if (experiment == ExperimentKind::almost_local || experiment == ExperimentKind::necessity_demo) {
    for (int r : r_values) {
      if (r < 1) field_error("r", "boundary statistics need radius >= 1");
    }
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(code_hash(cfg.to_json().dump()));
}

ordered_json offspring_spec_json(const OffspringSpec& spec) {
  ordered_json j;
  j["root_pmf"] = pmf_to_json(spec.root_pmf);
  j["shifted_pmf"] = pmf_to_json(spec.shifted_pmf);
  j["mean_degree"] = spec.mean_degree;
  j["nu"] = spec.nu;
  j["sigma2"] = spec.sigma2;
  j["xi"] = spec.xi;
  j["zeta"] = spec.zeta;
  return j;
}

ordered_json manifest_json(const ExperimentConfig& cfg) {
  ordered_json m;
  m["tool"] = "cmgiant";
  m["version"] = kLibraryVersion;
  m["config_hash"] = config_hash(cfg);
  m["seeds"] = cfg.seeds;
  m["config"] = cfg.to_json();
  const Context ctx(cfg);
  m["offspring_spec"] = ctx.spec() ? offspring_spec_json(*ctx.spec()) : ordered_json(nullptr);
  return m;
}

fs::path emit_manifest(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.output_dir.string());
  const fs::path path = cfg.output_dir / "manifest.json";
  write_file(path, manifest_json(cfg).dump(2) + "\n");
  return path;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Context ctx(cfg);
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : ctx.n_values()) {
    for (std::uint64_t s : cfg.seeds) jobs.push_back({n, s});
  }
  std::vector<Replicate> reps(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        reps[i] = run_one(ctx, jobs[i].n, jobs[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.threads, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  RunResult result;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const InvariantViolation& iv) {
      result.exit_status = 1;
      result.error = std::string("invariant violated: ") + iv.what();
      return result;
    }
  }

  // Single writer, in replicate order.
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.output_dir.string());
  try {
    auto emit = [&](const std::string& name, const std::string& content) {
      const fs::path p = cfg.output_dir / name;
      result.files.push_back(p);
      write_file(p, content);
    };
    emit("records.jsonl", records_jsonl(cfg, reps));
    emit("summary.csv", summary_csv(cfg, reps));
    std::string traces;
    for (const auto& rep : reps) {
      for (const auto& [name, content] : rep.files) emit(name, content);
      traces += rep.trace_lines;
    }
    if (!traces.empty()) emit("traces.jsonl", traces);
    result.files.push_back(cfg.output_dir / "manifest.json");
    emit_manifest(cfg);
  } catch (...) {
    for (const auto& p : result.files) fs::remove(p, ec);
    throw;
  }
  return result;
}

}  // namespace cmgiant
