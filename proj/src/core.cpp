#include "nashann/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nashann {

namespace {

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

double euclidean(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

bool all_finite(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(),
                     [](float x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------------------
// VectorSet

VectorSet::VectorSet(std::size_t n, std::size_t d, std::vector<float> data)
    : n_(n), d_(d), data_(std::move(data)) {
  if (d_ == 0) throw ConfigError("VectorSet: dimension must be >= 1");
  if (data_.size() != n_ * d_) {
    throw ConfigError("VectorSet: payload size " + std::to_string(data_.size()) +
                      " != n*d = " + std::to_string(n_ * d_));
  }
  if (!all_finite(data_)) throw ConfigError("VectorSet: non-finite value");
}

VectorSet VectorSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ConfigError("VectorSet: no rows");
  const std::size_t d = rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw ConfigError("VectorSet: ragged rows");
    for (double x : r) data.push_back(static_cast<float>(x));
  }
  return VectorSet(rows.size(), d, std::move(data));
}

VectorSet VectorSet::gather(std::span<const VectorId> ids) const {
  std::vector<float> out;
  out.reserve(ids.size() * d_);
  for (VectorId id : ids) {
    if (id >= n_) throw ConfigError("VectorSet::gather: id out of range");
    const auto r = row(id);
    out.insert(out.end(), r.begin(), r.end());
  }
  return VectorSet(ids.size(), d_, std::move(out));
}

// ---------------------------------------------------------------------------
// AttributeTable

AttributeTable::AttributeTable(std::size_t c,
                               std::vector<std::vector<AttributeId>> atb,
                               std::vector<std::size_t> class_sizes)
    : c_(c), atb_(std::move(atb)), class_sizes_(std::move(class_sizes)) {
  if (c_ == 0) throw ConfigError("AttributeTable: c must be >= 1");
  inverted_.assign(c_, {});
  single_ = true;
  for (std::size_t v = 0; v < atb_.size(); ++v) {
    auto& list = atb_[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) {
      throw ConfigError("AttributeTable: vector " + std::to_string(v) +
                        " has no attribute");
    }
    if (list.back() >= c_) {
      throw ConfigError("AttributeTable: attribute " +
                        std::to_string(list.back()) + " of vector " +
                        std::to_string(v) + " is outside [0, " +
                        std::to_string(c_) + ")");
    }
    if (list.size() != 1) single_ = false;
    for (AttributeId a : list) inverted_[a].push_back(static_cast<VectorId>(v));
  }
  if (!class_sizes_.empty()) {
    std::size_t total = 0;
    for (std::size_t s : class_sizes_) {
      if (s == 0) throw ConfigError("AttributeTable: empty attribute class");
      class_offsets_.push_back(total);
      total += s;
    }
    if (total != c_) {
      throw ConfigError("AttributeTable: class sizes sum to " +
                        std::to_string(total) + ", expected c = " +
                        std::to_string(c_));
    }
  }
}

void AttributeTable::require_single_attribute(const char* who) const {
  if (!single_) {
    throw ConfigError(std::string(who) +
                      " requires a single-attribute table (|atb(v)| = 1)");
  }
}

std::pair<AttributeId, AttributeId> AttributeTable::class_range(
    std::size_t i) const {
  const auto first = static_cast<AttributeId>(class_offsets_.at(i));
  return {first, static_cast<AttributeId>(first + class_sizes_[i])};
}

std::size_t AttributeTable::class_of(AttributeId a) const {
  if (class_sizes_.empty()) return 0;
  auto it = std::upper_bound(class_offsets_.begin(), class_offsets_.end(),
                             static_cast<std::size_t>(a));
  return static_cast<std::size_t>(it - class_offsets_.begin()) - 1;
}

bool AttributeTable::one_per_class() const {
  if (class_sizes_.empty()) return false;
  std::vector<std::size_t> hits(class_sizes_.size());
  for (const auto& list : atb_) {
    std::fill(hits.begin(), hits.end(), 0);
    for (AttributeId a : list) ++hits[class_of(a)];
    if (std::any_of(hits.begin(), hits.end(),
                    [](std::size_t h) { return h != 1; })) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Similarity

void SimilarityFn::validate() const {
  if (kind == SimilarityKind::kReciprocalEuclidean &&
      !(delta > 0.0 && std::isfinite(delta))) {
    throw ConfigError("reciprocal-euclidean similarity requires delta > 0");
  }
}

std::string to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kOnePlusCosine: return "cosine";
    case SimilarityKind::kReciprocalEuclidean: return "euclidean";
    case SimilarityKind::kDotProduct: return "dot";
  }
  return "unknown";
}

SimilarityKind parse_similarity_kind(const std::string& name) {
  if (name == "cosine" || name == "one-plus-cosine") {
    return SimilarityKind::kOnePlusCosine;
  }
  if (name == "euclidean" || name == "reciprocal-euclidean") {
    return SimilarityKind::kReciprocalEuclidean;
  }
  if (name == "dot" || name == "dot-product") return SimilarityKind::kDotProduct;
  throw ConfigError("unknown similarity '" + name + "'");
}

double similarity(const SimilarityFn& fn, std::span<const float> u,
                  std::span<const float> v, std::size_t* clamped) {
  if (u.size() != v.size()) {
    throw ConfigError("similarity: dimension mismatch (" +
                      std::to_string(u.size()) + " vs " +
                      std::to_string(v.size()) + ")");
  }
  if (!all_finite(u) || !all_finite(v)) {
    throw ConfigError("similarity: non-finite input");
  }
  fn.validate();
  switch (fn.kind) {
    case SimilarityKind::kOnePlusCosine: {
      const double nu = norm(u);
      const double nv = norm(v);
      if (nu == 0.0 || nv == 0.0) {
        throw ConfigError("similarity: zero vector under one-plus-cosine");
      }
      // Rounding can push the cosine a hair outside [-1, 1].
      return 1.0 + std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    }
    case SimilarityKind::kReciprocalEuclidean:
      return 1.0 / (euclidean(u, v) + fn.delta);
    case SimilarityKind::kDotProduct: {
      const double s = dot(u, v);
      if (s < 0.0) {
        if (clamped != nullptr) ++*clamped;
        return 0.0;
      }
      return s;
    }
  }
  return 0.0;
}

QueryScorer::QueryScorer(const SimilarityFn& fn, std::span<const float> query)
    : fn_(fn), query_(query) {
  fn_.validate();
  if (!all_finite(query_)) throw ConfigError("query has non-finite entries");
  query_norm_ = norm(query_);
  if (fn_.kind == SimilarityKind::kOnePlusCosine && query_norm_ == 0.0) {
    throw ConfigError("similarity: zero query under one-plus-cosine");
  }
}

double QueryScorer::operator()(std::span<const float> v) const {
  if (v.size() != query_.size()) {
    throw ConfigError("similarity: dimension mismatch");
  }
  switch (fn_.kind) {
    case SimilarityKind::kOnePlusCosine: {
      const double nv = norm(v);
      if (nv == 0.0) {
        throw ConfigError("similarity: zero vector under one-plus-cosine");
      }
      return 1.0 + std::clamp(dot(query_, v) / (query_norm_ * nv), -1.0, 1.0);
    }
    case SimilarityKind::kReciprocalEuclidean:
      return 1.0 / (euclidean(query_, v) + fn_.delta);
    case SimilarityKind::kDotProduct: {
      const double s = dot(query_, v);
      if (s < 0.0) {
        ++clamped_;
        return 0.0;
      }
      return s;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Utilities and welfare

void WelfareParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("welfare: eta must be > 0");
  }
  if (!(p <= 1.0) || !std::isfinite(p)) {
    throw ConfigError("welfare: p must be a finite value <= 1");
  }
}

std::vector<double> utilities(std::span<const float> query,
                              std::span<const VectorId> ids,
                              const SimilarityFn& fn, const VectorSet& data,
                              const AttributeTable& attrs) {
  if (query.size() != data.dim()) {
    throw ConfigError("utilities: query dimension mismatch");
  }
  const QueryScorer score(fn, query);
  std::vector<double> out(attrs.num_attributes(), 0.0);
  for (VectorId id : ids) {
    if (id >= data.size() || id >= attrs.num_vectors()) {
      throw ConfigError("utilities: invalid vector id " + std::to_string(id));
    }
    const double s = score(data.row(id));
    for (AttributeId a : attrs.attributes_of(id)) out[a] += s;
  }
  return out;
}

std::vector<double> utilities_from_scores(std::span<const VectorId> ids,
                                          std::span<const double> scores,
                                          const AttributeTable& attrs) {
  std::vector<double> out(attrs.num_attributes(), 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= attrs.num_vectors()) {
      throw ConfigError("utilities: invalid vector id " +
                        std::to_string(ids[i]));
    }
    for (AttributeId a : attrs.attributes_of(ids[i])) out[a] += scores[i];
  }
  return out;
}

namespace {

void check_utilities(std::span<const double> u) {
  if (u.empty()) throw ConfigError("welfare: need at least one attribute");
  for (double x : u) {
    if (x < 0.0 || !std::isfinite(x)) {
      throw ConfigError("welfare: utilities must be finite and >= 0");
    }
  }
}

}  // namespace

double log_nsw(std::span<const double> u, double eta) {
  if (!(eta > 0.0)) throw ConfigError("welfare: eta must be > 0");
  check_utilities(u);
  double acc = 0.0;
  for (double x : u) acc += std::log(x + eta);
  return acc / static_cast<double>(u.size());
}

double pow_pos(double x, double p) {
  if (p == 1.0) return x;
  return std::exp(p * std::log(x));
}

double welfare(std::span<const double> u, const WelfareParams& params) {
  params.validate();
  if (params.is_nash()) return std::exp(log_nsw(u, params.eta));
  check_utilities(u);
  double acc = 0.0;
  for (double x : u) acc += pow_pos(x + params.eta, params.p);
  const double mean = acc / static_cast<double>(u.size());
  return pow_pos(mean, 1.0 / params.p);
}

Selection make_selection(std::vector<VectorId> ids, std::vector<double> scores,
                         const AttributeTable& attrs,
                         const WelfareParams& params, bool truncated) {
  Selection s;
  s.utilities = utilities_from_scores(ids, scores, attrs);
  s.objective = welfare(s.utilities, params);
  s.ids = std::move(ids);
  s.scores = std::move(scores);
  s.truncated = truncated;
  return s;
}

}  // namespace nashann
