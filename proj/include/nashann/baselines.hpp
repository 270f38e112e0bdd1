#pragma once

// Reference retrieval strategies compared against the welfare solvers.

#include <cstddef>
#include <span>

#include "nashann/core.hpp"
#include "nashann/multi.hpp"
#include "nashann/oracle.hpp"

namespace nashann {

// Plain k most similar vectors of the dataset (ties by id). `report` only
// sets which welfare the Selection's objective reports.
Selection top_k(std::span<const float> query, std::size_t k,
                const VectorSet& data, const AttributeTable& attrs,
                const SimilarityFn& fn, const WelfareParams& report = {});

// First k entries of a pool.
Selection top_k(const CandidatePool& pool, std::size_t k,
                const AttributeTable& attrs, const WelfareParams& report = {});

// Maximum total similarity subject to at most `kprime` vectors per attribute
// (single-attribute tables). The constraint is separable: the top-k' of each
// attribute, then the global top-k of their union, is optimal.
Selection div_ann(std::span<const float> query, std::size_t k,
                  std::size_t kprime, const NeighborOracle& oracle,
                  const WelfareParams& report = {});

// Fetches the global top-L, then runs the single-attribute welfare greedy
// within that pool. Sets `pool_coverage` to the number of attributes present
// in the pool.
Selection fetch_union(std::span<const float> query, std::size_t k,
                      std::size_t pool_size, const WelfareParams& params,
                      const VectorSet& data, const AttributeTable& attrs,
                      const SimilarityFn& fn);

// Same, over an already fetched pool.
Selection fetch_union(const CandidatePool& pool, std::size_t k,
                      const WelfareParams& params, const AttributeTable& attrs);

}  // namespace nashann
