#include "cmgiant/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include <nlohmann/json.hpp>

namespace cmgiant {

const char* to_string(CouplingEvent e) {
  switch (e) {
    case CouplingEvent::none: return "none";
    case CouplingEvent::half_edge_reuse: return "half_edge_reuse";
    case CouplingEvent::vertex_reuse: return "vertex_reuse";
  }
  return "unknown";
}

CouplingExplorer::CouplingExplorer(const DegreeSequence& seq)
    : seq_(seq),
      offsets_(seq.size() + 1, 0),
      mate_(static_cast<std::size_t>(seq.total_degree()), -1),
      visited_(seq.size(), 0) {
  for (std::size_t v = 0; v < seq.size(); ++v) offsets_[v + 1] = offsets_[v] + seq[v];
  owner_.resize(mate_.size());
  for (std::size_t v = 0; v < seq.size(); ++v) {
    for (HalfEdge x = offsets_[v]; x < offsets_[v + 1]; ++x) owner_[x] = static_cast<Vertex>(v);
  }
}

void CouplingExplorer::reset() {
  for (HalfEdge x : touched_) mate_[x] = -1;
  touched_.clear();
  paired_count_ = 0;
}

void CouplingExplorer::pair(HalfEdge x, HalfEdge y) {
  mate_[x] = y;
  mate_[y] = x;
  touched_.push_back(x);
  touched_.push_back(y);
  paired_count_ += 2;
}

HalfEdge CouplingExplorer::draw_unpaired_excluding(HalfEdge x, Rng& rng) {
  const auto ell = static_cast<std::int64_t>(mate_.size());
  if (paired_count_ * 2 <= ell) {
    // Rejection is exact and cheap while most labels are free.
    for (;;) {
      const auto y = static_cast<HalfEdge>(rng.below(static_cast<std::uint64_t>(ell)));
      if (y != x && mate_[y] == -1) return y;
    }
  }
  std::vector<HalfEdge> free;
  for (HalfEdge y = 0; y < ell; ++y) {
    if (y != x && mate_[y] == -1) free.push_back(y);
  }
  return free[rng.below(free.size())];
}

CouplingTrace CouplingExplorer::explore(Vertex root, std::int64_t budget, Rng& rng) {
  if (budget < 1) throw ModelError("coupled_exploration: budget must be >= 1");
  if (root < 0 || static_cast<std::size_t>(root) >= seq_.size()) {
    throw ModelError("coupled_exploration: root out of range");
  }
  if (++visit_epoch_ == 0) {
    std::fill(visited_.begin(), visited_.end(), 0);
    visit_epoch_ = 1;
  }
  CouplingTrace trace;
  trace.root = root;
  trace.budget = budget;

  struct Entry {
    HalfEdge half_edge;
    int target_generation;
  };
  std::deque<Entry> graph_queue;
  std::deque<int> bp_queue;  // generation of each individual awaiting its children

  auto bump = [](std::vector<std::int64_t>& sizes, int g, std::int64_t by) {
    if (static_cast<std::size_t>(g) >= sizes.size()) sizes.resize(static_cast<std::size_t>(g) + 1, 0);
    sizes[g] += by;
  };
  // Marks w visited at generation g and queues its half-edges, except those
  // already paired into this exploration.
  auto discover = [&](Vertex w, int g) -> std::int64_t {
    visited_[w] = visit_epoch_;
    bump(trace.graph_generation_sizes, g, 1);
    ++trace.graph_total;
    std::int64_t pushed = 0;
    for (HalfEdge z = offsets_[w]; z < offsets_[w + 1]; ++z) {
      if (mate_[z] != -1 && visited_[owner_[mate_[z]]] == visit_epoch_) continue;
      graph_queue.push_back({z, g + 1});
      ++pushed;
    }
    return pushed;
  };

  discover(root, 0);
  const Degree root_degree = seq_[root];
  trace.bp_total = 1 + root_degree;
  bump(trace.bp_generation_sizes, 0, 1);
  bump(trace.bp_generation_sizes, 1, root_degree);
  for (Degree i = 0; i < root_degree; ++i) bp_queue.push_back(1);

  const auto ell = static_cast<std::uint64_t>(mate_.size());
  while (static_cast<std::int64_t>(trace.steps.size()) < budget) {
    // Entries whose half-edge was paired from the other end, to a vertex
    // already in this exploration, carry no new information.
    while (!graph_queue.empty()) {
      const HalfEdge x = graph_queue.front().half_edge;
      if (mate_[x] != -1 && visited_[owner_[mate_[x]]] == visit_epoch_) {
        graph_queue.pop_front();
        continue;
      }
      break;
    }
    const bool graph_active = !graph_queue.empty();
    const bool bp_active = !bp_queue.empty();
    if (!graph_active && !bp_active) break;

    CouplingStep step;
    HalfEdge bp_draw = -1;
    if (bp_active) {
      step.generation = bp_queue.front();
      bp_queue.pop_front();
      bp_draw = static_cast<HalfEdge>(rng.below(ell));
      step.bp_children = seq_[owner_[bp_draw]] - 1;
      for (std::int64_t c = 0; c < step.bp_children; ++c) bp_queue.push_back(step.generation + 1);
      bump(trace.bp_generation_sizes, step.generation + 1, step.bp_children);
      trace.bp_total += step.bp_children;
    }
    if (graph_active) {
      const Entry entry = graph_queue.front();
      graph_queue.pop_front();
      if (!bp_active) step.generation = entry.target_generation;
      const HalfEdge x = entry.half_edge;
      Vertex w = -1;
      if (mate_[x] != -1) {
        // Paired by an earlier exploration sharing this configuration.
        w = owner_[mate_[x]];
        if (bp_active) step.event = CouplingEvent::half_edge_reuse;
      } else if (bp_active && (bp_draw == x || mate_[bp_draw] != -1)) {
        step.event = CouplingEvent::half_edge_reuse;
        const HalfEdge y = draw_unpaired_excluding(x, rng);
        pair(x, y);
        w = owner_[y];
      } else if (bp_active) {
        if (visited_[owner_[bp_draw]] == visit_epoch_) step.event = CouplingEvent::vertex_reuse;
        pair(x, bp_draw);
        w = owner_[bp_draw];
      } else {
        const HalfEdge y = draw_unpaired_excluding(x, rng);
        pair(x, y);
        w = owner_[y];
      }
      if (visited_[w] != visit_epoch_) step.graph_children = discover(w, entry.target_generation);
    }

    if (step.event == CouplingEvent::half_edge_reuse) ++trace.half_edge_reuses;
    if (step.event == CouplingEvent::vertex_reuse) ++trace.vertex_reuses;
    if (!trace.first_divergence &&
        (step.event != CouplingEvent::none || !graph_active || !bp_active ||
         step.graph_children != step.bp_children)) {
      trace.first_divergence = trace.steps.size();
    }
    trace.steps.push_back(step);
  }

  trace.graph_complete_generations = graph_queue.empty()
                                         ? static_cast<int>(trace.graph_generation_sizes.size())
                                         : graph_queue.front().target_generation;
  trace.bp_complete_generations = bp_queue.empty() ? static_cast<int>(trace.bp_generation_sizes.size())
                                                   : bp_queue.front() + 1;
  return trace;
}

std::vector<CouplingTrace> coupled_exploration(const DegreeSequence& seq, const std::vector<Vertex>& roots,
                                               std::int64_t budget, Rng& rng) {
  if (roots.empty() || roots.size() > 2) throw ModelError("coupled_exploration: need one or two roots");
  CouplingExplorer explorer(seq);
  std::vector<CouplingTrace> traces;
  for (Vertex r : roots) traces.push_back(explorer.explore(r, budget, rng));
  return traces;
}

ReuseBounds reuse_bounds(std::size_t /*n*/, std::int64_t ell, Degree d_max, std::int64_t m) {
  if (ell <= 0) throw ModelError("reuse_bounds: ell must be positive");
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  return {m2 / static_cast<double>(ell), m2 * static_cast<double>(d_max) / static_cast<double>(ell)};
}

DiscrepancyEstimate discrepancy_estimate(const DegreeSequence& seq, Degree b, std::int64_t m_bar,
                                         double delta, std::size_t seeds, Rng& rng) {
  if (seq.max_degree() > b) throw ModelError("discrepancy_estimate: degree above the bound b");
  if (m_bar < 1 || seeds == 0 || !(delta > 0.0)) {
    throw ModelError("discrepancy_estimate: need m_bar >= 1, delta > 0 and at least one seed");
  }
  DiscrepancyEstimate est;
  const double ratio = static_cast<double>(m_bar) * static_cast<double>(m_bar) /
                       static_cast<double>(seq.total_degree());
  est.threshold = std::pow(ratio, 1.0 + delta);
  CouplingExplorer explorer(seq);
  std::size_t violations = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    explorer.reset();
    const auto root = static_cast<Vertex>(rng.below(seq.size()));
    const CouplingTrace trace = explorer.explore(root, static_cast<std::int64_t>(b + 1) * m_bar, rng);
    for (const auto& step : trace.steps) {
      est.max_step_discrepancy =
          std::max(est.max_step_discrepancy, std::abs(step.graph_children - step.bp_children));
    }
    // Compare through the first generation whose ball reaches m_bar.
    int last = std::min(trace.graph_complete_generations, trace.bp_complete_generations) - 1;
    std::int64_t ball = 0;
    for (int k = 0; k <= last; ++k) {
      ball += trace.graph_generation_sizes[k];
      if (ball >= m_bar) {
        last = k;
        break;
      }
    }
    bool violated = false;
    for (int k = 1; k <= last; ++k) {
      const auto bp = static_cast<std::size_t>(k) < trace.bp_generation_sizes.size() ? trace.bp_generation_sizes[k] : 0;
      const auto gr = static_cast<std::size_t>(k) < trace.graph_generation_sizes.size() ? trace.graph_generation_sizes[k] : 0;
      const double diff = std::abs(static_cast<double>(gr - bp));
      est.empirical_max_discrepancy = std::max(est.empirical_max_discrepancy, diff);
      if (diff > est.threshold) violated = true;
    }
    if (violated) ++violations;
  }
  est.violation_rate = static_cast<double>(violations) / static_cast<double>(seeds);
  return est;
}

void write_trace_jsonl(std::ostream& os, const CouplingTrace& trace) {
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    nlohmann::json rec = {{"root", trace.root},
                          {"step", i},
                          {"generation", s.generation},
                          {"graph_children", s.graph_children},
                          {"bp_children", s.bp_children},
                          {"event", to_string(s.event)}};
    os << rec.dump() << '\n';
  }
}

}  // namespace cmgiant
