#pragma once

// Brute-force optima and the set-packing reduction used to cross-check the
// solvers on small instances.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nashann/core.hpp"

namespace nashann {

// Subset enumeration refuses instances with more than this many k-subsets.
inline constexpr double kBruteForceLimit = 1e7;

struct BruteForceResult {
  std::vector<VectorId> ids;  // a maximizer, ascending
  // log NSW for p == 0, M_p otherwise.
  double value = 0.0;
  // welfare(utilities(ids), params), i.e. NSW for p == 0.
  double welfare = 0.0;
  std::size_t subsets_visited = 0;
};

// C(n, k) as a double (saturates to +inf).
double binomial(std::size_t n, std::size_t k);

// Exhaustive maximum of the configured welfare over all k-subsets. Uses a
// depth-first walk that carries the partial utility vector, so each subset
// costs O(c) at its leaf. The first maximizer in lexicographic order wins.
BruteForceResult brute_force_opt(std::span<const float> query, std::size_t k,
                                 const WelfareParams& objective,
                                 const VectorSet& data,
                                 const AttributeTable& attrs,
                                 const SimilarityFn& fn);

// Same, from precomputed per-vector similarities.
BruteForceResult brute_force_opt(std::span<const double> scores, std::size_t k,
                                 const WelfareParams& objective,
                                 const AttributeTable& attrs);

// Exact Regular Set Packing: `sets` are tau-subsets of [0, universe).
struct ErspInstance {
  std::size_t universe = 0;
  std::size_t tau = 0;
  std::vector<std::vector<std::uint32_t>> sets;
  std::size_t k = 0;

  void validate() const;
};

struct NannsInstance {
  VectorSet data;
  AttributeTable attrs;
  std::vector<float> query;
  SimilarityFn fn;
  WelfareParams params;  // eta = 1, p = 0
  double threshold = 0.0;  // W = tau * k * log 2 / c
};

// A size-k packing exists iff the built instance has a k-subset with
// log NSW >= W.
NannsInstance ersp_to_nanns(const ErspInstance& inst);

// Whether k pairwise-disjoint sets exist, by direct search.
bool has_exact_packing(const ErspInstance& inst);

// Random instance with m sets; elements drawn uniformly without replacement.
ErspInstance random_ersp(std::size_t universe, std::size_t tau, std::size_t m,
                         std::size_t k, std::uint64_t seed);

// x log(1 + a/x) <= a log 2 on a geometric grid of `samples` points in
// (0, a], with equality (1e-9) only at x = a.
bool log_ineq_check(double a, std::size_t samples);

}  // namespace nashann
