#include "cmgiant/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace cmgiant {

Pmf::Pmf(std::vector<std::int64_t> support, std::vector<double> probabilities)
    : support_(std::move(support)), probs_(std::move(probabilities)) {
  if (support_.size() != probs_.size()) {
    throw ModelError("pmf: support and probabilities differ in length");
  }
  if (support_.empty()) {
    throw ModelError("pmf: empty support");
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] < 0) throw ModelError("pmf: negative support point");
    if (i > 0 && support_[i] <= support_[i - 1]) {
      throw ModelError("pmf: support must be sorted and distinct");
    }
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw ModelError("pmf: probabilities must be finite and nonnegative");
    }
  }
  cumulative_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cumulative_.begin());
  if (std::abs(cumulative_.back() - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "pmf: probabilities sum to " << cumulative_.back();
    throw ModelError(msg.str());
  }
}

Pmf Pmf::from_map(const std::map<std::int64_t, double>& masses) {
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (const auto& [k, p] : masses) {
    support.push_back(k);
    probs.push_back(p);
  }
  return Pmf(std::move(support), std::move(probs));
}

Pmf Pmf::delta(std::int64_t k) { return Pmf({k}, {1.0}); }

double Pmf::at(std::int64_t k) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), k);
  if (it == support_.end() || *it != k) return 0.0;
  return probs_[static_cast<std::size_t>(it - support_.begin())];
}

double Pmf::cdf(std::int64_t k) const {
  auto it = std::upper_bound(support_.begin(), support_.end(), k);
  if (it == support_.begin()) return 0.0;
  // Clamp so the top of the support reads exactly 1.
  if (it == support_.end()) return 1.0;
  return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) m += static_cast<double>(support_[i]) * probs_[i];
  return m;
}

double Pmf::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto k = static_cast<double>(support_[i]);
    m += k * k * probs_[i];
  }
  return m;
}

std::int64_t Pmf::sample(Rng& rng) const {
  const double u = rng.uniform01() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::map<std::int64_t, double> Pmf::to_map() const {
  std::map<std::int64_t, double> out;
  for (std::size_t i = 0; i < support_.size(); ++i) out[support_[i]] = probs_[i];
  return out;
}

DegreeSequence::DegreeSequence(std::vector<Degree> degrees) : degrees_(std::move(degrees)) {
  if (degrees_.empty()) throw ModelError("degree sequence: n must be at least 1");
  for (Degree d : degrees_) {
    if (d < 1) throw ModelError("degree sequence: every degree must be >= 1");
    total_ += d;
  }
  if (total_ % 2 != 0) throw ModelError("degree sequence: total degree must be even");
}

Degree DegreeSequence::max_degree() const {
  return *std::max_element(degrees_.begin(), degrees_.end());
}

DegreeSequence sample_iid_degrees(const Pmf& dist, std::size_t n, Rng& rng) {
  if (n == 0) throw ModelError("sample_iid_degrees: n must be at least 1");
  if (dist.empty() || dist.min_value() < 1) {
    throw ModelError("sample_iid_degrees: degree distribution must have no mass at 0");
  }
  std::vector<Degree> degrees(n);
  std::int64_t total = 0;
  for (auto& d : degrees) {
    d = static_cast<Degree>(dist.sample(rng));
    total += d;
  }
  if (total % 2 != 0) degrees.back() += 1;
  return DegreeSequence(std::move(degrees));
}

Pmf empirical_distribution(const DegreeSequence& seq) {
  std::map<std::int64_t, std::size_t> counts;
  for (Degree d : seq.degrees()) ++counts[d];
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  const auto n = static_cast<double>(seq.size());
  for (const auto& [k, c] : counts) {
    support.push_back(k);
    probs.push_back(static_cast<double>(c) / n);
  }
  return Pmf(std::move(support), std::move(probs));
}

RegularityReport regularity_report(const DegreeSequence& seq, const Pmf& limit) {
  const Pmf emp = empirical_distribution(seq);
  RegularityReport rep;
  // Both CDFs are step functions; the supremum is attained on the union of supports.
  std::vector<std::int64_t> points = emp.support();
  points.insert(points.end(), limit.support().begin(), limit.support().end());
  for (std::int64_t k : points) {
    rep.sup_cdf_distance = std::max(rep.sup_cdf_distance, std::abs(emp.cdf(k) - limit.cdf(k)));
  }
  rep.mean_gap = std::abs(emp.mean() - limit.mean());
  const double m2 = limit.second_moment();
  if (std::isfinite(m2)) rep.second_moment_gap = std::abs(emp.second_moment() - m2);
  rep.d_max = seq.max_degree();
  return rep;
}

void write_degrees(std::ostream& os, const DegreeSequence& seq) {
  for (Degree d : seq.degrees()) os << d << '\n';
}

DegreeSequence read_degrees(std::istream& is) {
  std::vector<Degree> degrees;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long d = 0;
    std::string rest;
    if (!(ls >> d) || (ls >> rest)) {
      throw ModelError("degree file line " + std::to_string(lineno) + ": expected one integer");
    }
    degrees.push_back(static_cast<Degree>(d));
  }
  return DegreeSequence(std::move(degrees));
}

void write_pmf_csv(std::ostream& os, const Pmf& pmf) {
  os << "k,p\n" << std::setprecision(17);
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    os << pmf.support()[i] << ',' << pmf.probabilities()[i] << '\n';
  }
}

Pmf read_pmf_csv(std::istream& is) {
  std::map<std::int64_t, double> masses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "k,p") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ModelError("pmf csv line " + std::to_string(lineno) + ": expected 'k,p'");
    }
    try {
      const std::string key = line.substr(0, comma);
      std::size_t used = 0;
      const long long k = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
      const double p = std::stod(line.substr(comma + 1));
      if (!masses.emplace(k, p).second) {
        throw ModelError("pmf csv line " + std::to_string(lineno) + ": duplicate k");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ModelError*>(&e)) throw;
      throw ModelError("pmf csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return Pmf::from_map(masses);
}

}  // namespace cmgiant
