#pragma once

// Dataset I/O (fvecs / bvecs / ivecs, attribute text files), synthetic
// attribute assignment and train/query splitting.
//
// Binary containers hold consecutive records of a 4-byte little-endian
// dimension followed by that many payload values: float32 (fvecs), uint8
// (bvecs) or int32 (ivecs). All records of a file share the dimension.
//
// Attribute files are line oriented:
//
//   #c=<int>[;classes=<size>,<size>,...]
//   <vector_id>,<attr_id>[,<attr_id>...]
//
// Other lines starting with '#' are comments. Every vector id in [0, n) must
// appear exactly once, where n is the largest id + 1.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nashann/core.hpp"

namespace nashann {

struct IntMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::int32_t> values;  // row-major
};

VectorSet read_fvecs(const std::filesystem::path& path);
VectorSet read_bvecs(const std::filesystem::path& path);
IntMatrix read_ivecs(const std::filesystem::path& path);

// Reads by extension (.fvecs or .bvecs).
VectorSet read_vectors(const std::filesystem::path& path);

void write_fvecs(const std::filesystem::path& path, const VectorSet& data);
// Values are rounded and must fit in [0, 255].
void write_bvecs(const std::filesystem::path& path, const VectorSet& data);
void write_ivecs(const std::filesystem::path& path, const IntMatrix& data);

AttributeTable read_attrs(const std::filesystem::path& path);
void write_attrs(const std::filesystem::path& path, const AttributeTable& attrs);

struct KMeansOptions {
  std::size_t max_iterations = 50;
  double tolerance = 1e-4;  // relative change in inertia
  std::size_t threads = 1;
};

// Lloyd's k-means with k-means++ seeding. Returns the cluster of every row.
std::vector<std::uint32_t> kmeans_assign(const VectorSet& data, std::size_t c,
                                         std::uint64_t seed,
                                         const KMeansOptions& opts = {});

// One attribute per vector from k-means with c clusters. With `chunks` = m,
// each of the m consecutive d/m-dimensional slices is clustered on its own,
// giving a one-per-class table with m classes of c attributes.
AttributeTable cluster_attrs(const VectorSet& data, std::size_t c,
                             std::uint64_t seed,
                             std::optional<std::size_t> chunks = std::nullopt,
                             const KMeansOptions& opts = {});

// Skewed single-attribute assignment over c = 20: probability 0.9 uniform
// over {0, 1, 2}, otherwise uniform over {3, ..., 19}.
AttributeTable prob_attrs(std::size_t n, std::uint64_t seed);

struct Split {
  VectorSet base;
  VectorSet queries;
  std::vector<VectorId> base_ids;   // source row of each base vector
  std::vector<VectorId> query_ids;  // source row of each query
};

// Shuffled 4:1 split; base gets ceil(4n/5) rows.
Split split_dataset(const VectorSet& data, std::uint64_t seed);

// Isotropic Gaussian blobs: `centers` centres drawn from N(0, center_scale^2)
// and n points spread with unit variance around a uniformly chosen centre.
VectorSet gaussian_mixture(std::size_t n, std::size_t d, std::size_t centers,
                           double center_scale, std::uint64_t seed);

struct DatasetPreset {
  std::string name;
  SimilarityFn fn;
  double eta = 1.0;
};

// Named similarity / smoothing defaults: amazon, arxiv, sift, deep, pnns.
DatasetPreset preset(const std::string& name);
std::vector<std::string> preset_names();

struct DatasetBundle {
  VectorSet base;
  VectorSet queries;
  AttributeTable attrs;
  DatasetPreset preset;

  void validate() const;
};

}  // namespace nashann
