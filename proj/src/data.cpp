#include "nashann/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace nashann {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "vecs readers assume a little-endian host");

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

// Splits a vecs file into records of `elem` bytes per value. Returns (n, d)
// and the concatenated payload bytes.
std::pair<std::size_t, std::size_t> parse_vecs(const std::vector<char>& bytes,
                                               std::size_t elem,
                                               const fs::path& path,
                                               std::vector<char>& payload) {
  if (bytes.empty()) return {0, 0};
  if (bytes.size() < 4) throw IoError(path.string() + ": truncated header");
  std::int32_t d32 = 0;
  std::memcpy(&d32, bytes.data(), 4);
  if (d32 <= 0) {
    throw IoError(path.string() + ": invalid dimension " + std::to_string(d32));
  }
  const auto d = static_cast<std::size_t>(d32);
  const std::size_t record = 4 + d * elem;
  if (bytes.size() % record != 0) {
    throw IoError(path.string() + ": truncated file (" +
                  std::to_string(bytes.size()) + " bytes is not a multiple of " +
                  std::to_string(record) + ")");
  }
  const std::size_t n = bytes.size() / record;
  payload.resize(n * d * elem);
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t di = 0;
    std::memcpy(&di, bytes.data() + i * record, 4);
    if (di != d32) {
      throw IoError(path.string() + ": record " + std::to_string(i) +
                    " has dimension " + std::to_string(di) + ", expected " +
                    std::to_string(d32));
    }
    std::memcpy(payload.data() + i * d * elem, bytes.data() + i * record + 4,
                d * elem);
  }
  return {n, d};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_dim(std::ofstream& out, std::size_t d) {
  const auto d32 = static_cast<std::int32_t>(d);
  out.write(reinterpret_cast<const char*>(&d32), 4);
}

}  // namespace

VectorSet read_fvecs(const fs::path& path) {
  std::vector<char> payload;
  const auto [n, d] = parse_vecs(slurp(path), 4, path, payload);
  if (n == 0) return {};
  std::vector<float> values(n * d);
  std::memcpy(values.data(), payload.data(), payload.size());
  for (float x : values) {
    if (!std::isfinite(x)) throw IoError(path.string() + ": non-finite value");
  }
  return VectorSet(n, d, std::move(values));
}

VectorSet read_bvecs(const fs::path& path) {
  std::vector<char> payload;
  const auto [n, d] = parse_vecs(slurp(path), 1, path, payload);
  if (n == 0) return {};
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(static_cast<unsigned char>(payload[i]));
  }
  return VectorSet(n, d, std::move(values));
}

IntMatrix read_ivecs(const fs::path& path) {
  std::vector<char> payload;
  const auto [n, d] = parse_vecs(slurp(path), 4, path, payload);
  IntMatrix m{n, d, std::vector<std::int32_t>(n * d)};
  std::memcpy(m.values.data(), payload.data(), payload.size());
  return m;
}

VectorSet read_vectors(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fvecs") return read_fvecs(path);
  if (ext == ".bvecs") return read_bvecs(path);
  throw ConfigError("unsupported vector file extension '" + ext +
                    "' (expected .fvecs or .bvecs)");
}

void write_fvecs(const fs::path& path, const VectorSet& data) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    write_dim(out, data.dim());
    const auto r = data.row(i);
    out.write(reinterpret_cast<const char*>(r.data()),
              static_cast<std::streamsize>(r.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_bvecs(const fs::path& path, const VectorSet& data) {
  auto out = open_out(path);
  std::vector<unsigned char> buf(data.dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    write_dim(out, data.dim());
    const auto r = data.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const float v = std::round(r[j]);
      if (v < 0.0f || v > 255.0f) {
        throw ConfigError("write_bvecs: value outside [0, 255]");
      }
      buf[j] = static_cast<unsigned char>(v);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_ivecs(const fs::path& path, const IntMatrix& data) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < data.n; ++i) {
    write_dim(out, data.d);
    out.write(reinterpret_cast<const char*>(data.values.data() + i * data.d),
              static_cast<std::streamsize>(data.d * sizeof(std::int32_t)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Attribute files

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used != token.size() || v < 0) throw std::invalid_argument(token);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw IoError(where + ": expected a non-negative integer, got '" + token +
                  "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

AttributeTable read_attrs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::optional<std::size_t> c;
  std::vector<std::size_t> classes;
  std::vector<std::optional<std::vector<AttributeId>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("#c=", 0) != 0) continue;
      if (c) throw IoError(where + ": duplicate header");
      for (const auto& field : split(line.substr(1), ';')) {
        const auto eq = field.find('=');
        const std::string key = field.substr(0, eq);
        const std::string value =
            eq == std::string::npos ? "" : field.substr(eq + 1);
        if (key == "c") {
          c = parse_count(value, where);
        } else if (key == "classes") {
          for (const auto& s : split(value, ',')) {
            classes.push_back(parse_count(s, where));
          }
        } else {
          throw IoError(where + ": unknown header key '" + key + "'");
        }
      }
      continue;
    }
    if (!c) throw IoError(where + ": data before the '#c=' header");
    const auto fields = split(line, ',');
    if (fields.size() < 2) {
      throw IoError(where + ": expected 'vector_id,attr_id[,attr_id...]'");
    }
    const std::size_t id = parse_count(fields[0], where);
    if (id >= rows.size()) rows.resize(id + 1);
    if (rows[id]) {
      throw IoError(where + ": duplicate line for vector " + std::to_string(id));
    }
    std::vector<AttributeId> list;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const std::size_t a = parse_count(fields[i], where);
      if (a >= *c) {
        throw IoError(where + ": attribute " + std::to_string(a) +
                      " outside [0, " + std::to_string(*c) + ")");
      }
      list.push_back(static_cast<AttributeId>(a));
    }
    rows[id] = std::move(list);
  }
  if (!c) throw IoError(path.string() + ": missing '#c=' header");
  std::vector<std::vector<AttributeId>> atb;
  atb.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) {
      throw IoError(path.string() + ": missing vector " + std::to_string(i));
    }
    atb.push_back(std::move(*rows[i]));
  }
  try {
    return AttributeTable(*c, std::move(atb), std::move(classes));
  } catch (const ConfigError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_attrs(const fs::path& path, const AttributeTable& attrs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "#c=" << attrs.num_attributes();
  if (attrs.has_classes()) {
    out << ";classes=";
    const auto sizes = attrs.class_sizes();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      out << (i ? "," : "") << sizes[i];
    }
  }
  out << '\n';
  for (std::size_t v = 0; v < attrs.num_vectors(); ++v) {
    out << v;
    for (AttributeId a : attrs.attributes_of(static_cast<VectorId>(v))) {
      out << ',' << a;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// k-means

namespace {

double sq_dist(std::span<const float> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - b[i];
    acc += diff * diff;
  }
  return acc;
}

// Runs fn(begin, end) over [0, n) split into contiguous ranges.
template <typename Fn>
void parallel_ranges(std::size_t n, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([=] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<std::uint32_t> kmeans_assign(const VectorSet& data, std::size_t c,
                                         std::uint64_t seed,
                                         const KMeansOptions& opts) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n == 0) throw ConfigError("k-means: empty dataset");
  if (c == 0 || c > n) {
    throw ConfigError("k-means: need 1 <= c <= n (c = " + std::to_string(c) +
                      ", n = " + std::to_string(n) + ")");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(c);
  auto add_center = [&](std::size_t i) {
    const auto r = data.row(i);
    centers.emplace_back(r.begin(), r.end());
  };

  // k-means++ seeding.
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  const std::size_t i0 = first(rng);
  add_center(i0);
  chosen[i0] = true;
  std::vector<double> best(n);
  for (std::size_t i = 0; i < n; ++i) best[i] = sq_dist(data.row(i), centers[0]);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centers.size() < c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : best[i];
    std::size_t pick = n;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        target -= best[i];
        if (target <= 0.0 && best[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    if (pick == n) {
      // All remaining mass is zero (duplicates) or rounding ran off the end.
      for (std::size_t i = n; i-- > 0;) {
        if (!chosen[i] && (total == 0.0 || best[i] > 0.0)) {
          pick = i;
          break;
        }
      }
    }
    add_center(pick);
    chosen[pick] = true;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(data.row(i), centers.back()));
    }
  }

  // Lloyd iterations.
  std::vector<std::uint32_t> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    parallel_ranges(n, opts.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto r = data.row(i);
        std::uint32_t arg = 0;
        double dmin = sq_dist(r, centers[0]);
        for (std::size_t j = 1; j < c; ++j) {
          const double dj = sq_dist(r, centers[j]);
          if (dj < dmin) {
            dmin = dj;
            arg = static_cast<std::uint32_t>(j);
          }
        }
        assign[i] = arg;
        dist[i] = dmin;
      }
    });
    double inertia = 0.0;
    for (double x : dist) inertia += x;

    std::vector<std::vector<double>> sums(c, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(c, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = data.row(i);
      auto& s = sums[assign[i]];
      for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
      ++counts[assign[i]];
    }
    for (std::size_t j = 0; j < c; ++j) {
      if (counts[j] == 0) {
        // Re-seed an empty cluster at the worst-served point.
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        const auto r = data.row(far);
        centers[j].assign(r.begin(), r.end());
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t t = 0; t < d; ++t) {
        centers[j][t] = sums[j][t] / static_cast<double>(counts[j]);
      }
    }
    const double change = std::abs(prev_inertia - inertia);
    if (std::isfinite(prev_inertia) &&
        change <= opts.tolerance * std::max(prev_inertia, 1e-300)) {
      break;
    }
    prev_inertia = inertia;
  }
  // Final assignment against the last centres.
  parallel_ranges(n, opts.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto r = data.row(i);
      std::uint32_t arg = 0;
      double dmin = sq_dist(r, centers[0]);
      for (std::size_t j = 1; j < c; ++j) {
        const double dj = sq_dist(r, centers[j]);
        if (dj < dmin) {
          dmin = dj;
          arg = static_cast<std::uint32_t>(j);
        }
      }
      assign[i] = arg;
    }
  });
  return assign;
}

AttributeTable cluster_attrs(const VectorSet& data, std::size_t c,
                             std::uint64_t seed,
                             std::optional<std::size_t> chunks,
                             const KMeansOptions& opts) {
  if (c < 2) throw ConfigError("cluster_attrs: c must be >= 2");
  if (c > data.size()) throw ConfigError("cluster_attrs: c exceeds n");
  const std::size_t m = chunks.value_or(1);
  if (m == 0 || data.dim() % m != 0) {
    throw ConfigError("cluster_attrs: dimension " + std::to_string(data.dim()) +
                      " is not divisible into " + std::to_string(m) +
                      " chunks");
  }
  std::vector<std::vector<AttributeId>> atb(data.size());
  const std::size_t width = data.dim() / m;
  for (std::size_t chunk = 0; chunk < m; ++chunk) {
    std::vector<float> slice;
    slice.reserve(data.size() * width);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto r = data.row(i).subspan(chunk * width, width);
      slice.insert(slice.end(), r.begin(), r.end());
    }
    const auto assign = kmeans_assign(VectorSet(data.size(), width, std::move(slice)),
                                      c, seed + chunk, opts);
    for (std::size_t i = 0; i < data.size(); ++i) {
      atb[i].push_back(static_cast<AttributeId>(chunk * c + assign[i]));
    }
  }
  if (!chunks) return AttributeTable(c, std::move(atb));
  return AttributeTable(c * m, std::move(atb), std::vector<std::size_t>(m, c));
}

AttributeTable prob_attrs(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("prob_attrs: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution dominant(0.9);
  std::uniform_int_distribution<AttributeId> head(0, 2);
  std::uniform_int_distribution<AttributeId> tail(3, 19);
  std::vector<std::vector<AttributeId>> atb(n);
  for (auto& list : atb) list = {dominant(rng) ? head(rng) : tail(rng)};
  return AttributeTable(20, std::move(atb));
}

Split split_dataset(const VectorSet& data, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n < 5) throw ConfigError("split_dataset: need at least 5 vectors");
  std::vector<VectorId> order(n);
  std::iota(order.begin(), order.end(), VectorId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_base = (4 * n + 4) / 5;
  Split s;
  s.base_ids.assign(order.begin(), order.begin() + static_cast<long>(n_base));
  s.query_ids.assign(order.begin() + static_cast<long>(n_base), order.end());
  s.base = data.gather(s.base_ids);
  s.queries = data.gather(s.query_ids);
  return s;
}

VectorSet gaussian_mixture(std::size_t n, std::size_t d, std::size_t centers,
                           double center_scale, std::uint64_t seed) {
  if (n == 0 || d == 0 || centers == 0) {
    throw ConfigError("gaussian_mixture: n, d and centers must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> mu(centers * d);
  for (double& x : mu) x = center_scale * normal(rng);
  std::uniform_int_distribution<std::size_t> which(0, centers - 1);
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = which(rng);
    for (std::size_t t = 0; t < d; ++t) {
      values[i * d + t] = static_cast<float>(mu[j * d + t] + normal(rng));
    }
  }
  return VectorSet(n, d, std::move(values));
}

DatasetPreset preset(const std::string& name) {
  using K = SimilarityKind;
  if (name == "amazon") return {name, {K::kOnePlusCosine, 0.0}, 50.0};
  if (name == "arxiv") return {name, {K::kReciprocalEuclidean, 0.01}, 0.01};
  if (name == "sift") return {name, {K::kReciprocalEuclidean, 0.01}, 0.01};
  if (name == "deep") return {name, {K::kOnePlusCosine, 0.0}, 50.0};
  if (name == "pnns") return {name, {K::kReciprocalEuclidean, 0.0001}, 0.0001};
  if (name == "default") return {name, {K::kOnePlusCosine, 0.0}, 1.0};
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"default", "amazon", "arxiv", "sift", "deep", "pnns"};
}

void DatasetBundle::validate() const {
  if (base.empty()) throw ConfigError("dataset: empty base set");
  if (queries.empty()) throw ConfigError("dataset: empty query set");
  if (base.dim() != queries.dim()) {
    throw ConfigError("dataset: base dimension " + std::to_string(base.dim()) +
                      " != query dimension " + std::to_string(queries.dim()));
  }
  if (attrs.num_vectors() != base.size()) {
    throw ConfigError("dataset: attribute table covers " +
                      std::to_string(attrs.num_vectors()) + " vectors, base has " +
                      std::to_string(base.size()));
  }
  preset.fn.validate();
}

}  // namespace nashann
