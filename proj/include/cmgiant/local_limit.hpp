#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "cmgiant/degree_model.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

/// Root degree law p_k = 1 with k = 2: every cluster is a cycle and the
/// giant fraction does not concentrate, so no limit spec exists.
class DegenerateTwoRegularError : public ModelError {
 public:
  DegenerateTwoRegularError()
      : ModelError("offspring spec: root pmf {2:1} is degenerate (p_2 must be < 1)") {}
};

/// Unimodular Galton-Watson limit of the configuration model.
///
/// The root has D ~ root_pmf children; every other individual has
/// D* - 1 ~ shifted_pmf children, where shifted_pmf(k) = (k+1) p_{k+1} / E[D].
struct OffspringSpec {
  Pmf root_pmf;
  Pmf shifted_pmf;
  double mean_degree = 0.0;
  /// Mean of shifted_pmf, E[D(D-1)] / E[D].
  double nu = 0.0;
  /// Variance of shifted_pmf.
  double sigma2 = 0.0;
  /// Extinction probability of the shifted_pmf Galton-Watson process.
  double xi = 1.0;
  /// Survival probability of the unimodular tree.
  double zeta = 0.0;
  std::size_t xi_iterations = 0;

  bool supercritical() const { return nu > 1.0; }
  /// Probability generating function of shifted_pmf.
  double shifted_pgf(double x) const;
};

/// Derives every field from the root law. xi is the limit of monotone
/// iteration x <- shifted_pgf(x) from 0, stopped at |step| < 1e-12 or 10^6
/// iterations. Throws ModelError for mass at 0 and
/// DegenerateTwoRegularError for {2:1}.
OffspringSpec build_offspring_spec(const Pmf& root);

struct TheoreticalGiant {
  double zeta = 0.0;
  /// p_k (1 - xi^k).
  std::map<std::int64_t, double> vk_limit;
  /// E[D] (1 - xi^2) / 2.
  double edge_limit = 0.0;
};

TheoreticalGiant theoretical_giant(const OffspringSpec& spec);

enum class ProgenyMode { exact, monte_carlo };

inline constexpr int kExactProgenyMaxK = 30;
inline constexpr std::size_t kDefaultProgenySamples = 100'000;

/// Total progeny law of the shifted_pmf process truncated below k:
/// entry j is P(T* = j) for 1 <= j < k (entry 0 is 0).
std::vector<double> shifted_progeny_pmf(const OffspringSpec& spec, int k);

/// zeta_{>=k} = P(|C(o)| >= k) in the unimodular tree. Exact mode requires
/// k <= kExactProgenyMaxK.
double zeta_geq_k(const OffspringSpec& spec, std::int64_t k, ProgenyMode mode, Rng& rng,
                  std::size_t samples = kDefaultProgenySamples);

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

MonteCarloEstimate zeta_geq_k_monte_carlo(const OffspringSpec& spec, std::int64_t k, Rng& rng,
                                          std::size_t samples);

inline constexpr std::int64_t kDefaultPopulationCap = 1'000'000;

struct BranchingRun {
  /// Index g holds the size of generation g; length max_generation + 1.
  std::vector<std::int64_t> generation_sizes;
  std::int64_t total = 0;
  bool truncated = false;
  bool extinct() const { return !truncated && generation_sizes.back() == 0; }
};

/// Simulates generations 0..max_generation; stops (truncated) once the total
/// population would exceed cap.
BranchingRun simulate_unimodular_bp(const OffspringSpec& spec, int max_generation,
                                    std::int64_t cap, Rng& rng);

/// Galton-Watson process with shifted_pmf offspring from `initial` individuals.
BranchingRun simulate_shifted_bp(const OffspringSpec& spec, std::int64_t initial,
                                 int max_generation, std::int64_t cap, Rng& rng);

/// Runs the unimodular tree until it dies out (extinct) or its total
/// population reaches cap (treated as survival).
bool unimodular_bp_survives(const OffspringSpec& spec, std::int64_t cap, Rng& rng);

struct CondLimitEstimate {
  /// P(|C(o)| >= k, |boundary B_r(o)| < r_k).
  double p_big_cluster_small_boundary = 0.0;
  /// P(|C(o)| < k, |boundary B_r(o)| >= r_k).
  double p_small_cluster_big_boundary = 0.0;
};

CondLimitEstimate estimate_cond_limit(const OffspringSpec& spec, std::int64_t k, int r,
                                      std::int64_t r_k, std::size_t samples, Rng& rng);

inline constexpr double kDefaultEnvelopeAlpha = 0.6;

/// Deterministic sandwich around a supercritical generation-size sequence:
/// over_{k+1} = nu over_k + over_k^alpha, under_{k+1} = nu under_k - over_k^alpha.
struct Envelope {
  std::vector<double> under;
  std::vector<double> over;
  double alpha = kDefaultEnvelopeAlpha;
  double b0 = 0.0;
  double nu = 0.0;
  /// prod_{k<K} (1 + b0^{-(1-alpha)} nu^{-(1-alpha) k}).
  double growth_constant = 1.0;
  /// over_K <= growth_constant * b0 * nu^K.
  bool upper_bound_holds = true;

  bool contains(int k, double size) const { return under[k] <= size && size <= over[k]; }
};

Envelope envelope_recursion(std::int64_t b0, double nu, double alpha, int K);

}  // namespace cmgiant
