#pragma once

// Exact single-attribute welfare solvers over a per-attribute oracle.
//
// Both solvers prefetch the top-k of every attribute and then run k greedy
// rounds. Each round takes the next-best vector of the attribute whose
// marginal welfare gain is largest. Because the per-attribute marginals are
// monotone along each prefetched stream, the greedy result is optimal when
// the oracle is exact, and alpha-approximate for an alpha-approximate oracle.

#include <cstddef>
#include <span>
#include <vector>

#include "nashann/core.hpp"
#include "nashann/oracle.hpp"

namespace nashann {

// One attribute's prefetched ranking and how much of it is consumed.
struct AttributeStream {
  RankedList ranked;
  std::size_t taken = 0;  // k_l
  double cumsum = 0.0;    // w_l, sum of the taken similarities

  bool exhausted() const { return taken >= ranked.entries.size(); }
  const ScoredId& next() const { return ranked.entries[taken]; }
  void advance() {
    cumsum += ranked.entries[taken].score;
    ++taken;
  }
};

// F_l(i): log(prefix_i + eta) for p == 0, (prefix_i + eta)^p otherwise.
double stream_value(double prefix_sum, const WelfareParams& params);

// Gain of taking `next_score` on top of utility `w`: F(w + s) - F(w).
double marginal_gain(double w, double next_score, const WelfareParams& params);

struct GreedyCounters {
  std::size_t rounds = 0;       // greedy selection rounds performed
  std::size_t comparisons = 0;  // marginal evaluations across all rounds
};

// Greedy selection over prefetched streams. p == 0 maximizes the log
// marginal, p in (0, 1] maximizes the p-power marginal and p < 0 minimizes
// it. Ties go to the lowest attribute id; exhausted streams drop out.
Selection greedy_over_streams(std::vector<AttributeStream> streams,
                              std::size_t k, const WelfareParams& params,
                              const AttributeTable& attrs,
                              GreedyCounters* counters = nullptr);

// Nash-welfare optimal k-subset for a single-attribute table.
Selection nash_ann(std::span<const float> query, std::size_t k,
                   const WelfareParams& params, const NeighborOracle& oracle,
                   GreedyCounters* counters = nullptr);

// M_p-optimal k-subset for a single-attribute table. p == 0 forwards to
// nash_ann.
Selection p_mean_ann(std::span<const float> query, std::size_t k,
                     const WelfareParams& params, const NeighborOracle& oracle,
                     GreedyCounters* counters = nullptr);

}  // namespace nashann
