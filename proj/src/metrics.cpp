#include "nashann/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace nashann {

double approx_ratio(std::span<const double> selected_scores,
                    std::span<const double> optimal_scores) {
  const double num =
      std::accumulate(selected_scores.begin(), selected_scores.end(), 0.0);
  const double den =
      std::accumulate(optimal_scores.begin(), optimal_scores.end(), 0.0);
  if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double recall(std::span<const VectorId> selected,
              std::span<const VectorId> optimal) {
  if (optimal.empty()) throw ConfigError("recall: |O| must be >= 1");
  const std::unordered_set<VectorId> opt(optimal.begin(), optimal.end());
  const auto hits = std::count_if(selected.begin(), selected.end(),
                                  [&](VectorId v) { return opt.count(v) > 0; });
  return static_cast<double>(hits) / static_cast<double>(optimal.size());
}

std::vector<std::size_t> attribute_counts(std::span<const VectorId> selected,
                                          const AttributeTable& attrs) {
  std::vector<std::size_t> counts(attrs.num_attributes(), 0);
  for (VectorId v : selected) {
    if (v >= attrs.num_vectors()) {
      throw ConfigError("metrics: vector id " + std::to_string(v) +
                        " outside the attribute table");
    }
    for (AttributeId a : attrs.attributes_of(v)) ++counts[a];
  }
  return counts;
}

namespace {

std::pair<AttributeId, AttributeId> scope(
    const AttributeTable& attrs, std::optional<std::size_t> restrict_class) {
  if (!restrict_class) {
    return {0, static_cast<AttributeId>(attrs.num_attributes())};
  }
  if (!attrs.has_classes() || *restrict_class >= attrs.num_classes()) {
    throw ConfigError("metrics: unknown attribute class");
  }
  return attrs.class_range(*restrict_class);
}

}  // namespace

double entropy(std::span<const VectorId> selected, const AttributeTable& attrs,
               std::optional<std::size_t> restrict_class, LogBase base) {
  if (selected.empty()) return 0.0;
  const auto counts = attribute_counts(selected, attrs);
  const auto [first, last] = scope(attrs, restrict_class);
  const double size = static_cast<double>(selected.size());
  double h = 0.0;
  for (AttributeId a = first; a < last; ++a) {
    if (counts[a] == 0) continue;
    const double p = static_cast<double>(counts[a]) / size;
    h -= p * std::log(p);
  }
  return base == LogBase::kTwo ? h / std::log(2.0) : h;
}

double inverse_simpson(std::span<const VectorId> selected,
                       const AttributeTable& attrs,
                       std::optional<std::size_t> restrict_class) {
  if (selected.empty()) return 0.0;
  const auto counts = attribute_counts(selected, attrs);
  const auto [first, last] = scope(attrs, restrict_class);
  const double size = static_cast<double>(selected.size());
  double sum = 0.0;
  for (AttributeId a = first; a < last; ++a) {
    const double p = static_cast<double>(counts[a]) / size;
    sum += p * p;
  }
  return sum > 0.0 ? 1.0 / sum : 0.0;
}

std::size_t distinct_count(std::span<const VectorId> selected,
                           const AttributeTable& attrs) {
  const auto counts = attribute_counts(selected, attrs);
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(),
                    [](std::size_t n) { return n > 0; }));
}

MetricsReport evaluate(std::span<const VectorId> selected,
                       std::span<const double> selected_scores,
                       std::span<const VectorId> optimal,
                       std::span<const double> optimal_scores,
                       const AttributeTable& attrs, LogBase base) {
  MetricsReport r;
  r.approx_ratio = approx_ratio(selected_scores, optimal_scores);
  r.recall = recall(selected, optimal);
  r.entropy = entropy(selected, attrs, std::nullopt, base);
  r.inverse_simpson = inverse_simpson(selected, attrs);
  r.distinct_count = distinct_count(selected, attrs);
  for (std::size_t i = 0; i < attrs.num_classes(); ++i) {
    r.per_class.push_back(
        {i, entropy(selected, attrs, i, base), inverse_simpson(selected, attrs, i)});
  }
  return r;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size())));
  return values[rank == 0 ? 0 : rank - 1];
}

}  // namespace nashann
