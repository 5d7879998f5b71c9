#include "cmgiant/local_limit.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace cmgiant {
namespace {

constexpr double kXiTolerance = 1e-12;
constexpr std::size_t kXiMaxIterations = 1'000'000;

// a * b truncated to `length` entries.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < a.size() && i < length; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < length; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Total progeny of one unimodular tree, counting stops once `stop_at` is
// reached. Returns min(total, stop_at) or more.
std::int64_t unimodular_progeny_until(const OffspringSpec& spec, std::int64_t stop_at, Rng& rng) {
  std::int64_t pending = spec.root_pmf.sample(rng);
  std::int64_t total = 1 + pending;
  while (pending > 0 && total < stop_at) {
    const std::int64_t c = spec.shifted_pmf.sample(rng);
    total += c;
    pending += c - 1;
  }
  return total;
}

}  // namespace

double OffspringSpec::shifted_pgf(double x) const {
  double s = 0.0;
  const auto& support = shifted_pmf.support();
  const auto& probs = shifted_pmf.probabilities();
  for (std::size_t i = 0; i < support.size(); ++i) {
    s += probs[i] * std::pow(x, static_cast<double>(support[i]));
  }
  return s;
}

OffspringSpec build_offspring_spec(const Pmf& root) {
  if (root.empty() || root.min_value() < 1) {
    throw ModelError("offspring spec: root pmf must be supported on {1,2,...}");
  }
  if (root.size() == 1 && root.min_value() == 2) throw DegenerateTwoRegularError();

  OffspringSpec spec;
  spec.root_pmf = root;
  spec.mean_degree = root.mean();
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::int64_t k = root.support()[i];
    const double p = root.probabilities()[i];
    if (p == 0.0) continue;
    support.push_back(k - 1);
    probs.push_back(static_cast<double>(k) * p / spec.mean_degree);
  }
  spec.shifted_pmf = Pmf(std::move(support), std::move(probs));
  spec.nu = spec.shifted_pmf.mean();
  spec.sigma2 = spec.shifted_pmf.variance();

  double x = 0.0;
  std::size_t it = 0;
  for (; it < kXiMaxIterations; ++it) {
    const double next = spec.shifted_pgf(x);
    const double step = next - x;
    x = next;
    if (std::abs(step) < kXiTolerance) break;
  }
  // Iteration from 0 is nondecreasing and bounded by the smallest root.
  assert(x >= 0.0 && x <= 1.0 + 1e-15);
  spec.xi_iterations = it;
  // At or below criticality the smallest root is exactly 1; iteration only
  // approaches it (slowly at nu == 1).
  spec.xi = spec.supercritical() ? std::min(x, 1.0) : 1.0;
  double zeta = 0.0;
  for (std::size_t i = 0; i < root.size(); ++i) {
    zeta += root.probabilities()[i] *
            (1.0 - std::pow(spec.xi, static_cast<double>(root.support()[i])));
  }
  spec.zeta = zeta;
  return spec;
}

TheoreticalGiant theoretical_giant(const OffspringSpec& spec) {
  TheoreticalGiant out;
  out.zeta = spec.zeta;
  for (std::size_t i = 0; i < spec.root_pmf.size(); ++i) {
    const std::int64_t k = spec.root_pmf.support()[i];
    out.vk_limit[k] = spec.root_pmf.probabilities()[i] * (1.0 - std::pow(spec.xi, static_cast<double>(k)));
  }
  out.edge_limit = 0.5 * spec.mean_degree * (1.0 - spec.xi * spec.xi);
  return out;
}

std::vector<double> shifted_progeny_pmf(const OffspringSpec& spec, int k) {
  const auto length = static_cast<std::size_t>(std::max(k, 1));
  std::vector<double> q(length, 0.0);
  // T* = 1 + (sum of X i.i.d. copies of T*), X ~ shifted_pmf. Every copy is
  // >= 1, so q[j] only needs q[1..j-1] and at most j-1 copies.
  for (std::size_t j = 1; j < length; ++j) {
    std::vector<double> power(j, 0.0);
    power[0] = 1.0;  // q^{*0} = delta_0
    std::int64_t x = 0;
    double qj = 0.0;
    for (std::size_t i = 0; i < spec.shifted_pmf.size(); ++i) {
      const std::int64_t target = spec.shifted_pmf.support()[i];
      if (target > static_cast<std::int64_t>(j) - 1) break;
      while (x < target) {
        power = convolve(power, q, j);
        ++x;
      }
      qj += spec.shifted_pmf.probabilities()[i] * power[j - 1];
    }
    q[j] = qj;
  }
  return q;
}

double zeta_geq_k(const OffspringSpec& spec, std::int64_t k, ProgenyMode mode, Rng& rng,
                  std::size_t samples) {
  if (k < 1) throw ModelError("zeta_geq_k: k must be >= 1");
  if (mode == ProgenyMode::monte_carlo) return zeta_geq_k_monte_carlo(spec, k, rng, samples).value;
  if (k > kExactProgenyMaxK) {
    throw ModelError("zeta_geq_k: exact mode supports k <= " + std::to_string(kExactProgenyMaxK));
  }
  const auto len = static_cast<std::size_t>(k);
  const std::vector<double> q = shifted_progeny_pmf(spec, static_cast<int>(k));
  // T = 1 + (sum of D copies of T*); accumulate P(T = j) for j < k.
  double below = 0.0;
  std::vector<double> power(len, 0.0);
  power[0] = 1.0;
  std::int64_t d = 0;
  for (std::size_t i = 0; i < spec.root_pmf.size(); ++i) {
    const std::int64_t target = spec.root_pmf.support()[i];
    if (target > static_cast<std::int64_t>(k) - 2) break;
    while (d < target) {
      power = convolve(power, q, len);
      ++d;
    }
    double mass = 0.0;
    for (std::size_t j = 1; j < len; ++j) mass += power[j - 1];
    below += spec.root_pmf.probabilities()[i] * mass;
  }
  return 1.0 - below;
}

MonteCarloEstimate zeta_geq_k_monte_carlo(const OffspringSpec& spec, std::int64_t k, Rng& rng,
                                          std::size_t samples) {
  if (k < 1) throw ModelError("zeta_geq_k: k must be >= 1");
  if (samples == 0) throw ModelError("zeta_geq_k: need at least one sample");
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    if (unimodular_progeny_until(spec, k, rng) >= k) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

namespace {

BranchingRun run_generations(const OffspringSpec& spec, std::int64_t initial, bool unimodular_root,
                             int max_generation, std::int64_t cap, Rng& rng) {
  BranchingRun run;
  run.generation_sizes.reserve(static_cast<std::size_t>(max_generation) + 1);
  run.generation_sizes.push_back(initial);
  run.total = initial;
  std::int64_t current = initial;
  for (int g = 1; g <= max_generation; ++g) {
    std::int64_t next = 0;
    if (current > 0) {
      const Pmf& law = (g == 1 && unimodular_root) ? spec.root_pmf : spec.shifted_pmf;
      for (std::int64_t i = 0; i < current; ++i) {
        next += law.sample(rng);
        if (run.total + next > cap) {
          run.truncated = true;
          return run;
        }
      }
    }
    run.total += next;
    run.generation_sizes.push_back(next);
    current = next;
  }
  return run;
}

}  // namespace

BranchingRun simulate_unimodular_bp(const OffspringSpec& spec, int max_generation,
                                    std::int64_t cap, Rng& rng) {
  if (max_generation < 0) throw ModelError("simulate_unimodular_bp: max_generation must be >= 0");
  return run_generations(spec, 1, true, max_generation, cap, rng);
}

BranchingRun simulate_shifted_bp(const OffspringSpec& spec, std::int64_t initial,
                                 int max_generation, std::int64_t cap, Rng& rng) {
  if (max_generation < 0) throw ModelError("simulate_shifted_bp: max_generation must be >= 0");
  return run_generations(spec, initial, false, max_generation, cap, rng);
}

bool unimodular_bp_survives(const OffspringSpec& spec, std::int64_t cap, Rng& rng) {
  return unimodular_progeny_until(spec, cap, rng) >= cap;
}

CondLimitEstimate estimate_cond_limit(const OffspringSpec& spec, std::int64_t k, int r,
                                      std::int64_t r_k, std::size_t samples, Rng& rng) {
  if (k < 1 || r < 1 || r_k < 1 || samples == 0) {
    throw ModelError("estimate_cond_limit: thresholds and samples must be >= 1");
  }
  std::size_t big_small = 0;
  std::size_t small_big = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::int64_t current = 1;
    std::int64_t total = 1;
    std::int64_t boundary = -1;
    bool capped = false;
    for (int g = 0;; ++g) {
      if (g == r) boundary = current;
      if (current == 0) {
        if (boundary < 0) boundary = 0;
        break;
      }
      if (g >= r && total >= k) break;
      const Pmf& law = g == 0 ? spec.root_pmf : spec.shifted_pmf;
      std::int64_t next = 0;
      for (std::int64_t i = 0; i < current; ++i) next += law.sample(rng);
      total += next;
      current = next;
      if (total > kDefaultPopulationCap) {
        capped = true;
        break;
      }
    }
    const bool big_cluster = capped || total >= k;
    const bool big_boundary = (capped && boundary < 0) || boundary >= r_k;
    if (big_cluster && !big_boundary) ++big_small;
    if (!big_cluster && big_boundary) ++small_big;
  }
  const auto m = static_cast<double>(samples);
  return {static_cast<double>(big_small) / m, static_cast<double>(small_big) / m};
}

Envelope envelope_recursion(std::int64_t b0, double nu, double alpha, int K) {
  if (!(nu > 1.0)) throw ModelError("envelope_recursion: nu must exceed 1");
  if (!(alpha > 0.5 && alpha < 1.0)) throw ModelError("envelope_recursion: alpha must lie in (1/2, 1)");
  if (b0 < 1) throw ModelError("envelope_recursion: b0 must be >= 1");
  if (K < 0) throw ModelError("envelope_recursion: K must be >= 0");
  Envelope env;
  env.alpha = alpha;
  env.nu = nu;
  env.b0 = static_cast<double>(b0);
  env.under.assign(1, env.b0);
  env.over.assign(1, env.b0);
  for (int k = 0; k < K; ++k) {
    const double spread = std::pow(env.over[k], alpha);
    env.over.push_back(nu * env.over[k] + spread);
    env.under.push_back(nu * env.under[k] - spread);
    env.growth_constant *= 1.0 + std::pow(env.b0, -(1.0 - alpha)) * std::pow(nu, -(1.0 - alpha) * k);
  }
  const double bound = env.growth_constant * env.b0 * std::pow(nu, K);
  env.upper_bound_holds = env.over[K] <= bound * (1.0 + 1e-12);
  return env;
}

}  // namespace cmgiant
