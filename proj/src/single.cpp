#include "nashann/single.hpp"

#include <cmath>
#include <limits>

namespace nashann {

double stream_value(double prefix_sum, const WelfareParams& params) {
  const double x = prefix_sum + params.eta;
  return params.is_nash() ? std::log(x) : pow_pos(x, params.p);
}

double marginal_gain(double w, double next_score, const WelfareParams& params) {
  const double base = w + params.eta;
  if (params.is_nash()) return std::log1p(next_score / base);
  // For p == 1 the difference is exactly the similarity.
  if (params.p == 1.0) return next_score;
  return pow_pos(base + next_score, params.p) - pow_pos(base, params.p);
}

Selection greedy_over_streams(std::vector<AttributeStream> streams,
                              std::size_t k, const WelfareParams& params,
                              const AttributeTable& attrs,
                              GreedyCounters* counters) {
  params.validate();
  const bool minimize = params.p < 0.0;
  std::vector<VectorId> ids;
  std::vector<double> scores;
  ids.reserve(k);
  scores.reserve(k);

  GreedyCounters local;
  while (ids.size() < k) {
    std::size_t best = streams.size();
    double best_gain = 0.0;
    for (std::size_t l = 0; l < streams.size(); ++l) {
      const auto& s = streams[l];
      if (s.exhausted()) continue;
      const double g = marginal_gain(s.cumsum, s.next().score, params);
      ++local.comparisons;
      // Strict comparison keeps the lowest attribute id on ties.
      if (best == streams.size() || (minimize ? g < best_gain : g > best_gain)) {
        best = l;
        best_gain = g;
      }
    }
    if (best == streams.size()) break;  // every stream exhausted
    ++local.rounds;
    ids.push_back(streams[best].next().id);
    scores.push_back(streams[best].next().score);
    streams[best].advance();
  }
  if (counters != nullptr) *counters = local;
  const bool truncated = ids.size() < k;
  return make_selection(std::move(ids), std::move(scores), attrs, params,
                        truncated);
}

namespace {

std::vector<AttributeStream> prefetch(std::span<const float> query,
                                      std::size_t k,
                                      const NeighborOracle& oracle) {
  const auto& attrs = oracle.attributes();
  std::vector<AttributeStream> streams(attrs.num_attributes());
  for (AttributeId a = 0; a < attrs.num_attributes(); ++a) {
    if (attrs.members(a).empty()) {
      streams[a].ranked.attribute = a;
      continue;
    }
    streams[a].ranked = oracle.topk(query, a, k);
  }
  return streams;
}

}  // namespace

Selection nash_ann(std::span<const float> query, std::size_t k,
                   const WelfareParams& params, const NeighborOracle& oracle,
                   GreedyCounters* counters) {
  params.validate();
  if (!params.is_nash()) {
    throw ConfigError("nash_ann: expects p == 0, use p_mean_ann");
  }
  if (k == 0) throw ConfigError("nash_ann: k must be >= 1");
  oracle.attributes().require_single_attribute("nash_ann");
  return greedy_over_streams(prefetch(query, k, oracle), k, params,
                             oracle.attributes(), counters);
}

Selection p_mean_ann(std::span<const float> query, std::size_t k,
                     const WelfareParams& params, const NeighborOracle& oracle,
                     GreedyCounters* counters) {
  params.validate();
  if (params.is_nash()) return nash_ann(query, k, params, oracle, counters);
  if (k == 0) throw ConfigError("p_mean_ann: k must be >= 1");
  oracle.attributes().require_single_attribute("p_mean_ann");
  return greedy_over_streams(prefetch(query, k, oracle), k, params,
                             oracle.attributes(), counters);
}

}  // namespace nashann
