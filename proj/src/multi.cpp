#include "nashann/multi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

namespace nashann {

CandidatePool fetch_pool(std::span<const float> query, std::size_t pool_size,
                         const VectorSet& data, const SimilarityFn& fn) {
  if (pool_size == 0) throw ConfigError("pool size must be >= 1");
  if (data.empty()) throw ConfigError("pool: empty dataset");
  if (query.size() != data.dim()) {
    throw ConfigError("pool: query dimension mismatch");
  }
  std::vector<VectorId> all(data.size());
  std::iota(all.begin(), all.end(), VectorId{0});
  const QueryScorer score(fn, query);
  return {scan_topk(score, all, pool_size, data), PoolSource::kUnionOracle};
}

CandidatePool full_pool(std::span<const float> query, const VectorSet& data,
                        const SimilarityFn& fn) {
  CandidatePool pool = fetch_pool(query, data.size(), data, fn);
  pool.source = PoolSource::kFullScan;
  return pool;
}

namespace {

void check_pool(const CandidatePool& pool, const AttributeTable& attrs,
                const char* who) {
  if (pool.entries.empty()) {
    throw ConfigError(std::string(who) + ": empty candidate pool");
  }
  for (const auto& e : pool.entries) {
    if (e.id >= attrs.num_vectors()) {
      throw ConfigError(std::string(who) + ": pool id " + std::to_string(e.id) +
                        " not covered by the attribute table");
    }
  }
}

// (1/c) sum_{l in atb(v)} [log(u_l + eta + s) - log(u_l + eta)]. Each term is
// non-increasing in u_l under floating point, so stale values stay upper
// bounds.
double log_gain(const ScoredId& e, std::span<const double> u, double eta,
                const AttributeTable& attrs) {
  double g = 0.0;
  for (AttributeId a : attrs.attributes_of(e.id)) {
    g += std::log1p(e.score / (u[a] + eta));
  }
  return g / static_cast<double>(u.size());
}

double power_gain(const ScoredId& e, std::span<const double> u,
                  const WelfareParams& params, const AttributeTable& attrs) {
  const auto list = attrs.attributes_of(e.id);
  if (params.p == 1.0) {
    return e.score * static_cast<double>(list.size()) /
           static_cast<double>(u.size());
  }
  double g = 0.0;
  for (AttributeId a : list) {
    const double base = u[a] + params.eta;
    g += pow_pos(base + e.score, params.p) - pow_pos(base, params.p);
  }
  return g / static_cast<double>(u.size());
}

// Higher gain first, lower vector id on ties.
bool better(double ga, VectorId ia, double gb, VectorId ib) {
  return ga > gb || (ga == gb && ia < ib);
}

Selection finish(const std::vector<std::size_t>& chosen,
                 const CandidatePool& pool, const AttributeTable& attrs,
                 const WelfareParams& params, std::size_t k) {
  std::vector<VectorId> ids;
  std::vector<double> scores;
  for (std::size_t i : chosen) {
    ids.push_back(pool.entries[i].id);
    scores.push_back(pool.entries[i].score);
  }
  Selection s = make_selection(std::move(ids), std::move(scores), attrs,
                               params, chosen.size() < k);
  s.source = pool.source == PoolSource::kFullScan ? SelectionSource::kFullScan
                                                  : SelectionSource::kUnionOracle;
  return s;
}

void add_to_utilities(const ScoredId& e, std::vector<double>& u,
                      const AttributeTable& attrs) {
  for (AttributeId a : attrs.attributes_of(e.id)) u[a] += e.score;
}

std::vector<std::size_t> naive_greedy(
    std::size_t k, const CandidatePool& pool, const AttributeTable& attrs,
    const std::function<double(const ScoredId&, std::span<const double>)>&
        gain) {
  const std::size_t rounds = std::min(k, pool.entries.size());
  std::vector<double> u(attrs.num_attributes(), 0.0);
  std::vector<bool> taken(pool.entries.size(), false);
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < rounds; ++r) {
    std::size_t best = pool.entries.size();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < pool.entries.size(); ++i) {
      if (taken[i]) continue;
      const double g = gain(pool.entries[i], u);
      if (best == pool.entries.size() ||
          better(g, pool.entries[i].id, best_gain, pool.entries[best].id)) {
        best = i;
        best_gain = g;
      }
    }
    taken[best] = true;
    chosen.push_back(best);
    add_to_utilities(pool.entries[best], u, attrs);
  }
  return chosen;
}

struct LazyEntry {
  double bound;
  VectorId id;
  std::size_t index;
  std::size_t round;  // round in which `bound` was computed
};

struct LazyOrder {
  bool operator()(const LazyEntry& a, const LazyEntry& b) const {
    return better(b.bound, b.id, a.bound, a.id);
  }
};

std::vector<std::size_t> lazy_greedy(std::size_t k, double eta,
                                     const CandidatePool& pool,
                                     const AttributeTable& attrs) {
  std::vector<double> u(attrs.num_attributes(), 0.0);
  std::priority_queue<LazyEntry, std::vector<LazyEntry>, LazyOrder> heap;
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    heap.push({log_gain(pool.entries[i], u, eta, attrs), pool.entries[i].id, i,
               0});
  }
  std::vector<std::size_t> chosen;
  std::size_t round = 0;
  while (chosen.size() < k && !heap.empty()) {
    LazyEntry top = heap.top();
    heap.pop();
    if (top.round == round) {
      chosen.push_back(top.index);
      add_to_utilities(pool.entries[top.index], u, attrs);
      ++round;
      continue;
    }
    top.bound = log_gain(pool.entries[top.index], u, eta, attrs);
    top.round = round;
    heap.push(top);
  }
  return chosen;
}

}  // namespace

Selection multi_nash_ann(std::size_t k, double eta, const CandidatePool& pool,
                         const AttributeTable& attrs, GreedyMode mode) {
  const WelfareParams params{0.0, eta};
  params.validate();
  if (k == 0) throw ConfigError("multi_nash_ann: k must be >= 1");
  check_pool(pool, attrs, "multi_nash_ann");
  std::vector<std::size_t> chosen;
  if (mode == GreedyMode::kLazy) {
    chosen = lazy_greedy(k, eta, pool, attrs);
  } else {
    chosen = naive_greedy(k, pool, attrs,
                          [&](const ScoredId& e, std::span<const double> u) {
                            return log_gain(e, u, eta, attrs);
                          });
  }
  return finish(chosen, pool, attrs, params, k);
}

Selection multi_p_mean_ann(std::size_t k, const WelfareParams& params,
                           const CandidatePool& pool,
                           const AttributeTable& attrs) {
  params.validate();
  if (params.is_nash()) return multi_nash_ann(k, params.eta, pool, attrs);
  if (k == 0) throw ConfigError("multi_p_mean_ann: k must be >= 1");
  check_pool(pool, attrs, "multi_p_mean_ann");
  // For p < 0 the welfare improves as sum (u + eta)^p falls, so the most
  // negative change wins.
  const double sign = params.p > 0.0 ? 1.0 : -1.0;
  const auto chosen =
      naive_greedy(k, pool, attrs,
                   [&](const ScoredId& e, std::span<const double> u) {
                     return sign * power_gain(e, u, params, attrs);
                   });
  return finish(chosen, pool, attrs, params, k);
}

Selection multi_div_ann(std::size_t k, std::size_t kprime,
                        const CandidatePool& pool, const AttributeTable& attrs,
                        const WelfareParams& report) {
  report.validate();
  if (k == 0) throw ConfigError("multi_div_ann: k must be >= 1");
  if (kprime == 0) throw ConfigError("multi_div_ann: k' must be >= 1");
  check_pool(pool, attrs, "multi_div_ann");
  std::vector<std::size_t> count(attrs.num_attributes(), 0);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < pool.entries.size() && chosen.size() < k; ++i) {
    const auto list = attrs.attributes_of(pool.entries[i].id);
    const bool fits = std::all_of(list.begin(), list.end(), [&](AttributeId a) {
      return count[a] < kprime;
    });
    if (!fits) continue;
    for (AttributeId a : list) ++count[a];
    chosen.push_back(i);
  }
  return finish(chosen, pool, attrs, report, k);
}

}  // namespace nashann
