#pragma once

// Relevance and diversity measurements for a returned set.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nashann/core.hpp"

namespace nashann {

enum class LogBase { kNatural, kTwo };

// sum sigma(S) / sum sigma(O). Defined as 1 when both sums are 0.
double approx_ratio(std::span<const double> selected_scores,
                    std::span<const double> optimal_scores);

// |S n O| / |O|.
double recall(std::span<const VectorId> selected,
              std::span<const VectorId> optimal);

// Attribute histogram |S n D_l| for l in [0, c).
std::vector<std::size_t> attribute_counts(std::span<const VectorId> selected,
                                          const AttributeTable& attrs);

// Shannon entropy of p_l = |S n D_l| / |S|; with `restrict_class`, only the
// attributes of that class contribute.
double entropy(std::span<const VectorId> selected, const AttributeTable& attrs,
               std::optional<std::size_t> restrict_class = std::nullopt,
               LogBase base = LogBase::kNatural);

// 1 / sum p_l^2, optionally over one class.
double inverse_simpson(std::span<const VectorId> selected,
                       const AttributeTable& attrs,
                       std::optional<std::size_t> restrict_class = std::nullopt);

// Attributes with at least one selected vector.
std::size_t distinct_count(std::span<const VectorId> selected,
                           const AttributeTable& attrs);

struct ClassMetrics {
  std::size_t class_id = 0;
  double entropy = 0.0;
  double inverse_simpson = 0.0;
};

struct MetricsReport {
  double approx_ratio = 0.0;
  double recall = 0.0;
  double entropy = 0.0;
  double inverse_simpson = 0.0;
  std::size_t distinct_count = 0;
  std::vector<ClassMetrics> per_class;  // only for class-partitioned tables
};

// All metrics of `selected` against the exact top-k `optimal`.
MetricsReport evaluate(std::span<const VectorId> selected,
                       std::span<const double> selected_scores,
                       std::span<const VectorId> optimal,
                       std::span<const double> optimal_scores,
                       const AttributeTable& attrs,
                       LogBase base = LogBase::kNatural);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double std_error = 0.0;  // stddev / sqrt(n)
  std::size_t count = 0;
};

// Values are folded in the given order so repeated runs agree bit for bit.
Summary summarize(std::span<const double> values);

// Value at the given quantile (0..1) by nearest rank.
double quantile(std::vector<double> values, double q);

}  // namespace nashann
