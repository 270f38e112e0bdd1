#include "nashann/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <random>

namespace nashann {

namespace {

struct WorseOnTop {
  bool operator()(const ScoredId& a, const ScoredId& b) const {
    return ranks_before(a, b);
  }
};

void check_attribute(AttributeId attribute, const AttributeTable& attrs) {
  if (attribute >= attrs.num_attributes()) {
    throw ConfigError("oracle: attribute " + std::to_string(attribute) +
                      " out of range");
  }
}

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  // splitmix64 finalizer over the running hash
  h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::uint64_t hash_query(std::span<const float> q) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (float x : q) h = mix(h, std::bit_cast<std::uint32_t>(x));
  return h;
}

}  // namespace

std::vector<ScoredId> scan_topk(const QueryScorer& score,
                                std::span<const VectorId> candidates,
                                std::size_t k, const VectorSet& data) {
  std::vector<ScoredId> out;
  if (k == 0 || candidates.empty()) return out;
  std::priority_queue<ScoredId, std::vector<ScoredId>, WorseOnTop> heap;
  for (VectorId id : candidates) {
    const ScoredId e{id, score(data.row(id))};
    if (heap.size() < k) {
      heap.push(e);
    } else if (ranks_before(e, heap.top())) {
      heap.pop();
      heap.push(e);
    }
  }
  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

RankedList exact_topk(std::span<const float> query, AttributeId attribute,
                      std::size_t k, const VectorSet& data,
                      const AttributeTable& attrs, const SimilarityFn& fn) {
  if (k == 0) throw ConfigError("oracle: k must be >= 1");
  check_attribute(attribute, attrs);
  if (query.size() != data.dim()) {
    throw ConfigError("oracle: query dimension mismatch");
  }
  const QueryScorer score(fn, query);
  return {attribute, scan_topk(score, attrs.members(attribute), k, data)};
}

void AlphaOracleConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha oracle: alpha must lie in (0, 1]");
  }
}

RankedList alpha_topk(std::span<const float> query, AttributeId attribute,
                      std::size_t k, const VectorSet& data,
                      const AttributeTable& attrs, const SimilarityFn& fn,
                      const AlphaOracleConfig& cfg) {
  cfg.validate();
  if (k == 0) throw ConfigError("oracle: k must be >= 1");
  check_attribute(attribute, attrs);
  if (query.size() != data.dim()) {
    throw ConfigError("oracle: query dimension mismatch");
  }
  const QueryScorer score(fn, query);
  const auto members = attrs.members(attribute);
  // Full ranking of D_l; the exact top-m is its prefix.
  std::vector<ScoredId> ranked = scan_topk(score, members, members.size(), data);
  const std::size_t m = std::min(k, ranked.size());
  if (cfg.alpha == 1.0) {
    ranked.resize(m);
    return {attribute, std::move(ranked)};
  }

  std::mt19937_64 rng(mix(mix(cfg.seed, hash_query(query)), attribute));
  // Slot i may be filled by any unused member scoring >= alpha * s*_i. Those
  // members form a prefix of `ranked` that always holds the true top-i, so an
  // unused one exists. After sorting, the j-th best pick is >= alpha * s*_j.
  std::vector<bool> used(ranked.size(), false);
  std::vector<ScoredId> picked;
  picked.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double bar = cfg.alpha * ranked[i].score;
    std::size_t end = i + 1;
    while (end < ranked.size() && ranked[end].score >= bar) ++end;
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < end; ++j) {
      if (!used[j]) open.push_back(j);
    }
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const std::size_t j = open[pick(rng)];
    used[j] = true;
    picked.push_back(ranked[j]);
  }
  std::sort(picked.begin(), picked.end(), ranks_before);
  return {attribute, std::move(picked)};
}

ExactOracle::ExactOracle(const VectorSet& data, const AttributeTable& attrs,
                         SimilarityFn fn)
    : data_(data), attrs_(attrs), fn_(fn) {
  fn_.validate();
  if (data_.empty()) throw ConfigError("oracle: empty dataset");
  if (attrs_.num_vectors() != data_.size()) {
    throw ConfigError("oracle: attribute table covers " +
                      std::to_string(attrs_.num_vectors()) + " vectors, data has " +
                      std::to_string(data_.size()));
  }
}

RankedList ExactOracle::topk(std::span<const float> query,
                             AttributeId attribute, std::size_t k) const {
  return exact_topk(query, attribute, k, data_, attrs_, fn_);
}

AlphaOracle::AlphaOracle(const VectorSet& data, const AttributeTable& attrs,
                         SimilarityFn fn, AlphaOracleConfig cfg)
    : data_(data), attrs_(attrs), fn_(fn), cfg_(cfg) {
  fn_.validate();
  cfg_.validate();
  if (attrs_.num_vectors() != data_.size()) {
    throw ConfigError("oracle: attribute table does not match data");
  }
}

RankedList AlphaOracle::topk(std::span<const float> query,
                             AttributeId attribute, std::size_t k) const {
  return alpha_topk(query, attribute, k, data_, attrs_, fn_, cfg_);
}

}  // namespace nashann
