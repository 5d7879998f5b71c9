#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cmgiant/degree_model.hpp"
#include "cmgiant/graph_build.hpp"
#include "cmgiant/rng.hpp"

namespace cmgiant {

enum class CouplingEvent : std::uint8_t { none, half_edge_reuse, vertex_reuse };

const char* to_string(CouplingEvent e);

struct CouplingStep {
  std::int64_t graph_children = 0;
  std::int64_t bp_children = 0;
  CouplingEvent event = CouplingEvent::none;
  /// Generation of the individual (and graph vertex) whose children are drawn.
  int generation = 0;
};

/// Joint breadth-first exploration of the configuration model (with lazy
/// pairing) and of the n-dependent branching process, driven by the same
/// uniform half-edge draws.
struct CouplingTrace {
  Vertex root = 0;
  std::vector<CouplingStep> steps;
  std::optional<std::size_t> first_divergence;
  std::int64_t budget = 0;
  std::int64_t half_edge_reuses = 0;
  std::int64_t vertex_reuses = 0;
  /// graph_generation_sizes[k] = |boundary B_k(root)| as found by the
  /// exploration; bp_generation_sizes[k] = |BP_k|.
  std::vector<std::int64_t> graph_generation_sizes;
  std::vector<std::int64_t> bp_generation_sizes;
  /// Generations below these indices are complete on each side.
  int graph_complete_generations = 0;
  int bp_complete_generations = 0;
  /// Root plus all children born on each side.
  std::int64_t graph_total = 0;
  std::int64_t bp_total = 0;

  bool diverged() const { return first_divergence.has_value(); }
};

/// Lazy pairing state over one degree sequence. Reusable across traces:
/// reset() only touches labels paired since the last reset.
class CouplingExplorer {
 public:
  explicit CouplingExplorer(const DegreeSequence& seq);

  /// Runs up to `budget` steps from `root`. Pairings made by earlier calls
  /// since the last reset() stay in place, which is how two-root mode shares
  /// one lazy configuration.
  CouplingTrace explore(Vertex root, std::int64_t budget, Rng& rng);
  void reset();

  const DegreeSequence& degrees() const { return seq_; }

 private:
  HalfEdge draw_unpaired_excluding(HalfEdge x, Rng& rng);
  void pair(HalfEdge x, HalfEdge y);

  DegreeSequence seq_;
  std::vector<HalfEdge> offsets_;
  std::vector<Vertex> owner_;
  std::vector<HalfEdge> mate_;
  std::vector<HalfEdge> touched_;
  std::vector<std::uint32_t> visited_;
  std::uint32_t visit_epoch_ = 0;
  std::int64_t paired_count_ = 0;
};

/// One root (roots.size() == 1) or two roots sharing the lazy pairing.
std::vector<CouplingTrace> coupled_exploration(const DegreeSequence& seq, const std::vector<Vertex>& roots,
                                               std::int64_t budget, Rng& rng);

struct ReuseBounds {
  /// m^2 / ell: expected half-edge re-uses within m steps.
  double half_edge_bound = 0.0;
  /// m^2 d_max / ell: bound on the probability of a vertex re-use.
  double vertex_bound = 0.0;
};

ReuseBounds reuse_bounds(std::size_t n, std::int64_t ell, Degree d_max, std::int64_t m);

struct DiscrepancyEstimate {
  /// Largest |graph boundary - BP generation| seen over seeds and compared generations.
  double empirical_max_discrepancy = 0.0;
  /// (m_bar^2 / ell)^{1+delta}.
  double threshold = 0.0;
  /// Fraction of seeds on which some compared generation exceeds the threshold.
  double violation_rate = 0.0;
  /// Largest per-step |graph_children - bp_children|; never above b.
  std::int64_t max_step_discrepancy = 0;
};

/// Explores from a uniform root to budget (b+1) m_bar and compares
/// generation sizes up to the first generation whose ball reaches m_bar.
DiscrepancyEstimate discrepancy_estimate(const DegreeSequence& seq, Degree b, std::int64_t m_bar,
                                         double delta, std::size_t seeds, Rng& rng);

/// One JSON object per step.
void write_trace_jsonl(std::ostream& os, const CouplingTrace& trace);

}  // namespace cmgiant
