#include "nashann/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace nashann {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
  }
  return std::round(r);
}

namespace {

// Order-preserving stand-in for the welfare: sum log for p == 0, sum x^p for
// p > 0 and -sum x^p for p < 0. Evaluated from scratch at every leaf; running
// updates cancel badly when eta^p dwarfs the filled terms.
double proxy_term(double x, const WelfareParams& params) {
  if (params.is_nash()) return std::log(x);
  const double t = pow_pos(x, params.p);
  return params.p > 0.0 ? t : -t;
}

class Enumerator {
 public:
  Enumerator(std::span<const double> scores, std::size_t k,
             const WelfareParams& params, const AttributeTable& attrs)
      : scores_(scores), k_(k), params_(params), attrs_(attrs),
        c_(attrs.num_attributes()),
        utils_(k + 1, std::vector<double>(c_, 0.0)),
        path_(k) {}

  void run() { descend(0, 0); }

  std::vector<VectorId> best_ids;
  std::size_t visited = 0;

 private:
  void descend(std::size_t depth, std::size_t start) {
    if (depth == k_) {
      ++visited;
      double proxy = 0.0;
      for (double u : utils_[depth]) proxy += proxy_term(u + params_.eta, params_);
      if (best_ids.empty() || proxy > best_proxy_) {
        best_proxy_ = proxy;
        best_ids.assign(path_.begin(), path_.end());
      }
      return;
    }
    const std::size_t n = scores_.size();
    for (std::size_t i = start; i + (k_ - depth) <= n; ++i) {
      auto& next = utils_[depth + 1];
      next = utils_[depth];
      const double s = scores_[i];
      for (AttributeId a : attrs_.attributes_of(static_cast<VectorId>(i))) {
        next[a] += s;
      }
      path_[depth] = static_cast<VectorId>(i);
      descend(depth + 1, i + 1);
    }
  }

  std::span<const double> scores_;
  std::size_t k_;
  WelfareParams params_;
  const AttributeTable& attrs_;
  std::size_t c_;
  std::vector<std::vector<double>> utils_;
  std::vector<VectorId> path_;
  double best_proxy_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

BruteForceResult brute_force_opt(std::span<const double> scores, std::size_t k,
                                 const WelfareParams& objective,
                                 const AttributeTable& attrs) {
  objective.validate();
  const std::size_t n = scores.size();
  if (k == 0) throw ConfigError("brute_force_opt: k must be >= 1");
  if (k > n) throw ConfigError("brute_force_opt: k exceeds n");
  if (attrs.num_vectors() != n) {
    throw ConfigError("brute_force_opt: attribute table does not match data");
  }
  if (binomial(n, k) > kBruteForceLimit) {
    throw ConfigError("brute_force_opt: C(" + std::to_string(n) + ", " +
                      std::to_string(k) + ") exceeds the enumeration guard");
  }
  Enumerator e(scores, k, objective, attrs);
  e.run();

  BruteForceResult r;
  r.ids = std::move(e.best_ids);
  r.subsets_visited = e.visited;
  std::vector<double> chosen;
  for (VectorId id : r.ids) chosen.push_back(scores[id]);
  const auto u = utilities_from_scores(r.ids, chosen, attrs);
  r.welfare = welfare(u, objective);
  r.value = objective.is_nash() ? log_nsw(u, objective.eta) : r.welfare;
  return r;
}

BruteForceResult brute_force_opt(std::span<const float> query, std::size_t k,
                                 const WelfareParams& objective,
                                 const VectorSet& data,
                                 const AttributeTable& attrs,
                                 const SimilarityFn& fn) {
  if (query.size() != data.dim()) {
    throw ConfigError("brute_force_opt: query dimension mismatch");
  }
  const QueryScorer score(fn, query);
  std::vector<double> scores(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) scores[i] = score(data.row(i));
  return brute_force_opt(scores, k, objective, attrs);
}

// ---------------------------------------------------------------------------
// Set packing reduction

void ErspInstance::validate() const {
  if (universe == 0 || tau == 0 || k == 0) {
    throw ConfigError("ERSP: universe, tau and k must be >= 1");
  }
  for (const auto& s : sets) {
    std::vector<std::uint32_t> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        sorted.size() != tau) {
      throw ConfigError("ERSP: every set needs exactly tau distinct elements");
    }
    if (sorted.back() >= universe) {
      throw ConfigError("ERSP: element outside the universe");
    }
  }
}

NannsInstance ersp_to_nanns(const ErspInstance& inst) {
  inst.validate();
  if (inst.sets.empty()) throw ConfigError("ERSP: no sets");
  const std::size_t n = inst.universe;
  const std::size_t m = inst.sets.size();
  const float entry = 1.0f / static_cast<float>(inst.tau);
  std::vector<float> payload(m * n, 0.0f);
  std::vector<std::vector<AttributeId>> atb(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::uint32_t e : inst.sets[i]) {
      payload[i * n + e] = entry;
      atb[i].push_back(e);
    }
  }
  NannsInstance out{
      VectorSet(m, n, std::move(payload)),
      AttributeTable(n, std::move(atb)),
      std::vector<float>(n, 1.0f),
      SimilarityFn{SimilarityKind::kDotProduct, 0.0},
      WelfareParams{0.0, 1.0},
      static_cast<double>(inst.tau * inst.k) * std::log(2.0) /
          static_cast<double>(n)};
  return out;
}

namespace {

bool pack(const std::vector<std::uint64_t>& masks, std::size_t start,
          std::size_t need, std::uint64_t used) {
  if (need == 0) return true;
  for (std::size_t i = start; i + need <= masks.size(); ++i) {
    if ((masks[i] & used) == 0 && pack(masks, i + 1, need - 1, used | masks[i])) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool has_exact_packing(const ErspInstance& inst) {
  inst.validate();
  if (inst.universe > 64) {
    throw ConfigError("has_exact_packing: universe limited to 64 elements");
  }
  std::vector<std::uint64_t> masks;
  for (const auto& s : inst.sets) {
    std::uint64_t m = 0;
    for (std::uint32_t e : s) m |= std::uint64_t{1} << e;
    masks.push_back(m);
  }
  return pack(masks, 0, inst.k, 0);
}

ErspInstance random_ersp(std::size_t universe, std::size_t tau, std::size_t m,
                         std::size_t k, std::uint64_t seed) {
  if (tau > universe) throw ConfigError("ERSP: tau exceeds universe");
  std::mt19937_64 rng(seed);
  ErspInstance inst{universe, tau, {}, k};
  std::vector<std::uint32_t> pool(universe);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::size_t i = 0; i < m; ++i) {
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::uint32_t> s(pool.begin(),
                                 pool.begin() + static_cast<long>(tau));
    std::sort(s.begin(), s.end());
    inst.sets.push_back(std::move(s));
  }
  return inst;
}

bool log_ineq_check(double a, std::size_t samples) {
  if (!(a > 0.0)) throw ConfigError("log_ineq_check: a must be > 0");
  if (samples < 2) throw ConfigError("log_ineq_check: need >= 2 samples");
  const double bound = a * std::log(2.0);
  // Grid from a down to a * 1e-9, geometric.
  const double ratio = std::pow(1e-9, 1.0 / static_cast<double>(samples - 1));
  double x = a;
  for (std::size_t i = 0; i < samples; ++i, x *= ratio) {
    const double f = x * std::log1p(a / x);
    if (f > bound + 1e-12) return false;
    if (i == 0) {
      if (std::abs(f - bound) > 1e-9) return false;
    } else if (!(f < bound)) {
      return false;
    }
  }
  return true;
}

}  // namespace nashann
