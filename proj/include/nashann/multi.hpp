#pragma once

// Multi-attribute solvers. They run over a candidate pool fetched by a plain
// similarity search (or the full dataset for small instances).

#include <cstddef>
#include <span>
#include <vector>

#include "nashann/core.hpp"
#include "nashann/oracle.hpp"

namespace nashann {

enum class PoolSource { kFullScan, kUnionOracle };

struct CandidatePool {
  std::vector<ScoredId> entries;  // distinct ids, sorted by ranks_before
  PoolSource source = PoolSource::kUnionOracle;
};

// Top-L of the whole dataset.
CandidatePool fetch_pool(std::span<const float> query, std::size_t pool_size,
                         const VectorSet& data, const SimilarityFn& fn);

// Every vector of the dataset, ranked.
CandidatePool full_pool(std::span<const float> query, const VectorSet& data,
                        const SimilarityFn& fn);

enum class GreedyMode {
  kLazy,   // priority queue of stale upper bounds
  kNaive,  // recompute every candidate each round
};

// Greedy maximization of log NSW over the pool. At eta = 1 the objective is
// normalized, monotone and submodular, so the result is within (1 - 1/e) of
// the optimum in log space. Other eta values run the same greedy without that
// guarantee. Ties go to the lower vector id.
Selection multi_nash_ann(std::size_t k, double eta, const CandidatePool& pool,
                         const AttributeTable& attrs,
                         GreedyMode mode = GreedyMode::kLazy);

// Greedy on the change in sum_l (u_l + eta)^p: largest increase for p > 0,
// largest decrease for p < 0. p == 0 forwards to multi_nash_ann.
Selection multi_p_mean_ann(std::size_t k, const WelfareParams& params,
                           const CandidatePool& pool,
                           const AttributeTable& attrs);

// Walks the pool in similarity order and keeps a vector unless it would put
// more than `kprime` selected vectors on one of its attributes. May stop
// short of k (truncated). `report` only sets the objective reported.
Selection multi_div_ann(std::size_t k, std::size_t kprime,
                        const CandidatePool& pool, const AttributeTable& attrs,
                        const WelfareParams& report = {});

}  // namespace nashann
