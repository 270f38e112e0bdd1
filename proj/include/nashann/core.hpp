#pragma once

// Shared domain types for welfare-based diverse neighbor search: vector
// storage, attribute tables, similarity functions, attribute utilities and
// the Nash / p-mean welfare objectives.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashann {

using VectorId = std::uint32_t;
using AttributeId = std::uint32_t;

/// Raised for invalid arguments, malformed tables and incompatible options.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by readers and writers on filesystem or format problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major n x d matrix. Payload is 32-bit; all arithmetic on it is
// carried out in 64-bit.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::size_t n, std::size_t d, std::vector<float> data);

  static VectorSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return n_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  std::span<const float> raw() const { return data_; }

  // Rows in the given order, as a new set.
  VectorSet gather(std::span<const VectorId> ids) const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> data_;
};

// Attribute assignment atb(v) for every vector plus the transposed
// per-attribute lists D_l. Optionally the attribute ids are partitioned into
// disjoint classes.
class AttributeTable {
 public:
  AttributeTable() = default;

  // `atb[v]` lists the attributes of vector v. Lists are sorted and
  // deduplicated on construction. `class_sizes`, when non-empty, splits
  // [0, c) into consecutive classes of the given sizes.
  AttributeTable(std::size_t c, std::vector<std::vector<AttributeId>> atb,
                 std::vector<std::size_t> class_sizes = {});

  std::size_t num_attributes() const { return c_; }
  std::size_t num_vectors() const { return atb_.size(); }

  std::span<const AttributeId> attributes_of(VectorId v) const {
    return atb_[v];
  }
  std::span<const VectorId> members(AttributeId a) const {
    return inverted_[a];
  }

  // True when every vector carries exactly one attribute.
  bool single_attribute() const { return single_; }
  // Throws ConfigError unless single_attribute().
  void require_single_attribute(const char* who) const;

  bool has_classes() const { return !class_sizes_.empty(); }
  std::size_t num_classes() const { return class_sizes_.size(); }
  std::span<const std::size_t> class_sizes() const { return class_sizes_; }
  // Attribute ids of class i, as the half-open range [first, last).
  std::pair<AttributeId, AttributeId> class_range(std::size_t i) const;
  std::size_t class_of(AttributeId a) const;
  // Every vector has exactly one attribute in each class.
  bool one_per_class() const;

 private:
  std::size_t c_ = 0;
  std::vector<std::vector<AttributeId>> atb_;
  std::vector<std::vector<VectorId>> inverted_;
  std::vector<std::size_t> class_sizes_;
  std::vector<std::size_t> class_offsets_;
  bool single_ = false;
};

enum class SimilarityKind { kOnePlusCosine, kReciprocalEuclidean, kDotProduct };

struct SimilarityFn {
  SimilarityKind kind = SimilarityKind::kOnePlusCosine;
  double delta = 0.01;  // reciprocal-euclidean only

  void validate() const;
};

std::string to_string(SimilarityKind kind);
SimilarityKind parse_similarity_kind(const std::string& name);

// sigma(u, v) >= 0. Dot products below zero are clamped to 0; `clamped`, when
// given, is incremented each time that happens.
double similarity(const SimilarityFn& fn, std::span<const float> u,
                  std::span<const float> v, std::size_t* clamped = nullptr);

// Per-query similarity evaluator. Caches the query norm and counts dot-product
// clamps for diagnostics. Not shared between threads.
class QueryScorer {
 public:
  QueryScorer(const SimilarityFn& fn, std::span<const float> query);

  double operator()(std::span<const float> v) const;
  std::size_t clamped() const { return clamped_; }
  std::span<const float> query() const { return query_; }

 private:
  SimilarityFn fn_;
  std::span<const float> query_;
  double query_norm_ = 0.0;
  mutable std::size_t clamped_ = 0;
};

struct WelfareParams {
  double p = 0.0;    // 0 selects the Nash (geometric mean) objective
  double eta = 1.0;  // smoothing added to every utility

  void validate() const;
  bool is_nash() const { return p == 0.0; }
};

// u_l(S) = sum of sigma(q, v) over v in S carrying attribute l.
std::vector<double> utilities(std::span<const float> query,
                              std::span<const VectorId> ids,
                              const SimilarityFn& fn, const VectorSet& data,
                              const AttributeTable& attrs);

// Same, from precomputed similarities aligned with `ids`.
std::vector<double> utilities_from_scores(std::span<const VectorId> ids,
                                          std::span<const double> scores,
                                          const AttributeTable& attrs);

// (1/c) sum log(u_l + eta).
double log_nsw(std::span<const double> utilities, double eta);

// M_p(u + eta); p == 0 gives the geometric mean computed in log space.
double welfare(std::span<const double> utilities, const WelfareParams& params);

// (x)^p for x > 0, evaluated as exp(p log x).
double pow_pos(double x, double p);

enum class SelectionSource { kDirect, kFullScan, kUnionOracle };

struct Selection {
  std::vector<VectorId> ids;        // in selection order
  std::vector<double> scores;       // sigma(q, ids[i])
  std::vector<double> utilities;    // length c
  double objective = 0.0;           // welfare(utilities, params)
  bool truncated = false;           // fewer than k vectors were available
  SelectionSource source = SelectionSource::kDirect;
  // Distinct attributes present in the candidate pool (pool-based solvers).
  std::optional<std::size_t> pool_coverage;
};

// Fills utilities and objective from ids/scores.
Selection make_selection(std::vector<VectorId> ids, std::vector<double> scores,
                         const AttributeTable& attrs,
                         const WelfareParams& params, bool truncated);

}  // namespace nashann
