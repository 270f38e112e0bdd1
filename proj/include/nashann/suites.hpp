#pragma once

// Randomized verification suites: solver optimality against brute force,
// approximation guarantees, marginal and submodularity properties and the set-packing
// reduction. Shared by the `verify` CLI command and the acceptance tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nashann/core.hpp"

namespace nashann {

struct RandomInstance {
  VectorSet data;
  AttributeTable attrs;
  std::vector<float> query;
  SimilarityFn fn;
};

// n random Gaussian vectors in d dimensions, each carrying between 1 and
// `max_attrs` attributes out of c (exactly 1 when max_attrs == 1). The
// similarity kind is drawn at random from the three supported kinds.
RandomInstance random_instance(std::mt19937_64& rng, std::size_t n,
                               std::size_t d, std::size_t c,
                               std::size_t max_attrs);

struct SuiteOptions {
  std::size_t trials = 0;  // 0 keeps the suite's default
  std::uint64_t seed = 1;
  std::vector<double> alphas = {0.5, 0.9};
};

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::string first_failure;
  double seconds = 0.0;

  bool passed() const { return violations == 0 && trials > 0; }
};

// Nash solver vs brute force on single-attribute instances (n <= 20, c <= 6,
// k <= 5, eta in {0.01, 1, 50}); value equality at 1e-9 relative.
SuiteResult suite_nash_optimality(const SuiteOptions& opts);
// p-mean solver vs brute force for p in {-10, -1, -0.5, 0.5, 1}.
SuiteResult suite_pmean_optimality(const SuiteOptions& opts);
// Alpha-degraded oracle: welfare(result) >= alpha * optimum, Nash and p-mean.
SuiteResult suite_alpha(const SuiteOptions& opts);
// Multi-attribute greedy at eta = 1: (1 - 1/e) log NSW(opt) <= log NSW(greedy)
// <= log NSW(opt), plus lazy == naive selection.
SuiteResult suite_greedy_bound(const SuiteOptions& opts);
// Prefetched streams: Nash and p in (0, 1] marginals non-increasing, p < 0
// marginals non-decreasing.
SuiteResult suite_marginals(const SuiteOptions& opts);
// log NSW at eta = 1: f(empty) = 0, monotone, submodular.
SuiteResult suite_submodularity(const SuiteOptions& opts);
// x log(1 + a/x) <= a log 2 on random (a, x) and a fixed grid sweep.
SuiteResult suite_log_inequality(const SuiteOptions& opts);
// Equal similarities spread over attributes; a single relevant attribute
// takes every slot.
SuiteResult suite_examples(const SuiteOptions& opts);
// Among subsets with the solver's per-attribute counts, the solver's welfare
// is maximal.
SuiteResult suite_size_match(const SuiteOptions& opts);
// Brute-force max log NSW >= W iff a perfect packing exists.
SuiteResult suite_ersp(const SuiteOptions& opts);

struct SuiteEntry {
  std::string name;
  std::function<SuiteResult(const SuiteOptions&)> run;
};

// All suites in a fixed order.
const std::vector<SuiteEntry>& all_suites();

}  // namespace nashann
