#pragma once

// Per-attribute top-k neighbor oracles.

#include <cstdint>
#include <span>
#include <vector>

#include "nashann/core.hpp"

namespace nashann {

struct ScoredId {
  VectorId id = 0;
  double score = 0.0;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

// Ranking order: higher score first, lower id on ties.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
  return a.score > b.score || (a.score == b.score && a.id < b.id);
}

struct RankedList {
  AttributeId attribute = 0;
  std::vector<ScoredId> entries;  // sorted by ranks_before
};

// Top-k of `candidates` by sigma(q, .), using a bounded heap over one linear
// scan. Result is sorted by ranks_before.
std::vector<ScoredId> scan_topk(const QueryScorer& score,
                                std::span<const VectorId> candidates,
                                std::size_t k, const VectorSet& data);

// Exact top-min(k, |D_l|) of D_l.
RankedList exact_topk(std::span<const float> query, AttributeId attribute,
                      std::size_t k, const VectorSet& data,
                      const AttributeTable& attrs, const SimilarityFn& fn);

struct AlphaOracleConfig {
  double alpha = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Test-only degraded oracle. Returns min(k, |D_l|) members of D_l whose i-th
// best similarity is at least alpha times the true i-th best. Which members
// are returned is a deterministic function of (seed, query, attribute).
RankedList alpha_topk(std::span<const float> query, AttributeId attribute,
                      std::size_t k, const VectorSet& data,
                      const AttributeTable& attrs, const SimilarityFn& fn,
                      const AlphaOracleConfig& cfg);

// Pluggable per-attribute neighbor source over a fixed dataset. Calls are
// const and may run concurrently.
class NeighborOracle {
 public:
  virtual ~NeighborOracle() = default;

  virtual RankedList topk(std::span<const float> query, AttributeId attribute,
                          std::size_t k) const = 0;

  virtual const VectorSet& data() const = 0;
  virtual const AttributeTable& attributes() const = 0;
  virtual const SimilarityFn& similarity_fn() const = 0;
};

class ExactOracle final : public NeighborOracle {
 public:
  ExactOracle(const VectorSet& data, const AttributeTable& attrs,
              SimilarityFn fn);

  RankedList topk(std::span<const float> query, AttributeId attribute,
                  std::size_t k) const override;

  const VectorSet& data() const override { return data_; }
  const AttributeTable& attributes() const override { return attrs_; }
  const SimilarityFn& similarity_fn() const override { return fn_; }

 private:
  const VectorSet& data_;
  const AttributeTable& attrs_;
  SimilarityFn fn_;
};

class AlphaOracle final : public NeighborOracle {
 public:
  AlphaOracle(const VectorSet& data, const AttributeTable& attrs,
              SimilarityFn fn, AlphaOracleConfig cfg);

  RankedList topk(std::span<const float> query, AttributeId attribute,
                  std::size_t k) const override;

  const VectorSet& data() const override { return data_; }
  const AttributeTable& attributes() const override { return attrs_; }
  const SimilarityFn& similarity_fn() const override { return fn_; }

 private:
  const VectorSet& data_;
  const AttributeTable& attrs_;
  SimilarityFn fn_;
  AlphaOracleConfig cfg_;
};

}  // namespace nashann
