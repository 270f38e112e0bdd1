#include "nashann/baselines.hpp"

#include <algorithm>

#include "nashann/single.hpp"

namespace nashann {

Selection top_k(std::span<const float> query, std::size_t k,
                const VectorSet& data, const AttributeTable& attrs,
                const SimilarityFn& fn, const WelfareParams& report) {
  if (k == 0) throw ConfigError("top_k: k must be >= 1");
  Selection s = top_k(fetch_pool(query, k, data, fn), k, attrs, report);
  s.source = SelectionSource::kFullScan;
  return s;
}

Selection top_k(const CandidatePool& pool, std::size_t k,
                const AttributeTable& attrs, const WelfareParams& report) {
  if (k == 0) throw ConfigError("top_k: k must be >= 1");
  const std::size_t m = std::min(k, pool.entries.size());
  std::vector<VectorId> ids;
  std::vector<double> scores;
  for (std::size_t i = 0; i < m; ++i) {
    ids.push_back(pool.entries[i].id);
    scores.push_back(pool.entries[i].score);
  }
  return make_selection(std::move(ids), std::move(scores), attrs, report,
                        m < k);
}

Selection div_ann(std::span<const float> query, std::size_t k,
                  std::size_t kprime, const NeighborOracle& oracle,
                  const WelfareParams& report) {
  if (k == 0) throw ConfigError("div_ann: k must be >= 1");
  if (kprime == 0) throw ConfigError("div_ann: k' must be >= 1");
  const auto& attrs = oracle.attributes();
  attrs.require_single_attribute("div_ann");
  // More than k from one attribute can never be used.
  const std::size_t per_attr = std::min(kprime, k);
  std::vector<ScoredId> merged;
  for (AttributeId a = 0; a < attrs.num_attributes(); ++a) {
    if (attrs.members(a).empty()) continue;
    const RankedList r = oracle.topk(query, a, per_attr);
    merged.insert(merged.end(), r.entries.begin(), r.entries.end());
  }
  const std::size_t m = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<long>(m),
                    merged.end(), ranks_before);
  std::vector<VectorId> ids;
  std::vector<double> scores;
  for (std::size_t i = 0; i < m; ++i) {
    ids.push_back(merged[i].id);
    scores.push_back(merged[i].score);
  }
  return make_selection(std::move(ids), std::move(scores), attrs, report,
                        m < k);
}

Selection fetch_union(std::span<const float> query, std::size_t k,
                      std::size_t pool_size, const WelfareParams& params,
                      const VectorSet& data, const AttributeTable& attrs,
                      const SimilarityFn& fn) {
  if (pool_size < k) {
    throw ConfigError("fetch_union: pool size L must be >= k");
  }
  return fetch_union(fetch_pool(query, pool_size, data, fn), k, params, attrs);
}

Selection fetch_union(const CandidatePool& pool, std::size_t k,
                      const WelfareParams& params,
                      const AttributeTable& attrs) {
  params.validate();
  if (k == 0) throw ConfigError("fetch_union: k must be >= 1");
  attrs.require_single_attribute("fetch_union");
  std::vector<AttributeStream> streams(attrs.num_attributes());
  for (AttributeId a = 0; a < attrs.num_attributes(); ++a) {
    streams[a].ranked.attribute = a;
  }
  // The pool is ranked, so each attribute's slice is ranked as well.
  for (const auto& e : pool.entries) {
    if (e.id >= attrs.num_vectors()) {
      throw ConfigError("fetch_union: pool id outside the attribute table");
    }
    streams[attrs.attributes_of(e.id).front()].ranked.entries.push_back(e);
  }
  const auto coverage = static_cast<std::size_t>(
      std::count_if(streams.begin(), streams.end(), [](const auto& s) {
        return !s.ranked.entries.empty();
      }));
  Selection s = greedy_over_streams(std::move(streams), k, params, attrs);
  s.source = SelectionSource::kUnionOracle;
  s.pool_coverage = coverage;
  return s;
}

}  // namespace nashann
