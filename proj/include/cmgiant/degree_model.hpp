#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmgiant/rng.hpp"

namespace cmgiant {

using Degree = std::int32_t;
using Vertex = std::int32_t;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finitely supported probability mass function on the nonnegative integers.
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-12;

  Pmf() = default;
  /// Throws ModelError unless support is sorted, distinct and nonnegative,
  /// probabilities are nonnegative and sum to 1 within kSumTolerance.
  Pmf(std::vector<std::int64_t> support, std::vector<double> probabilities);
  static Pmf from_map(const std::map<std::int64_t, double>& masses);
  /// Point mass at k.
  static Pmf delta(std::int64_t k);

  const std::vector<std::int64_t>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }

  /// P(X = k); 0 off the support.
  double at(std::int64_t k) const;
  /// P(X <= k).
  double cdf(std::int64_t k) const;
  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }
  std::int64_t min_value() const { return support_.front(); }
  std::int64_t max_value() const { return support_.back(); }

  std::int64_t sample(Rng& rng) const;

  std::map<std::int64_t, double> to_map() const;

  bool operator==(const Pmf&) const = default;

 private:
  std::vector<std::int64_t> support_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Positive degrees with even total: the sole input of the configuration model.
class DegreeSequence {
 public:
  DegreeSequence() = default;
  /// Throws ModelError if empty, any degree is < 1, or the total is odd.
  explicit DegreeSequence(std::vector<Degree> degrees);

  std::span<const Degree> degrees() const { return degrees_; }
  Degree operator[](std::size_t v) const { return degrees_[v]; }
  std::size_t size() const { return degrees_.size(); }
  std::int64_t total_degree() const { return total_; }
  Degree max_degree() const;

  bool operator==(const DegreeSequence&) const = default;

 private:
  std::vector<Degree> degrees_;
  std::int64_t total_ = 0;
};

/// n i.i.d. draws from dist. An odd total is repaired by adding one to the
/// last degree. Throws ModelError if dist puts mass on 0 or n == 0.
DegreeSequence sample_iid_degrees(const Pmf& dist, std::size_t n, Rng& rng);

/// P(D_n = k) = n_k / n.
Pmf empirical_distribution(const DegreeSequence& seq);

struct RegularityReport {
  double sup_cdf_distance = 0.0;
  double mean_gap = 0.0;
  /// Absent when the limiting second moment is not finite.
  std::optional<double> second_moment_gap;
  Degree d_max = 0;
};

RegularityReport regularity_report(const DegreeSequence& seq, const Pmf& limit);

// Text formats: degree sequences are newline-delimited integers, pmfs are
// two-column "k,p" CSV (an optional "k,p" header line is accepted).
void write_degrees(std::ostream& os, const DegreeSequence& seq);
DegreeSequence read_degrees(std::istream& is);
void write_pmf_csv(std::ostream& os, const Pmf& pmf);
Pmf read_pmf_csv(std::istream& is);

}  // namespace cmgiant
