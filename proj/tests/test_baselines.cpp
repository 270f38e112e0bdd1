#include <catch_amalgamated.hpp>

#include <random>

#include "naive.hpp"
#include "nashann/baselines.hpp"
#include "nashann/data.hpp"
#include "nashann/metrics.hpp"
#include "nashann/oracle.hpp"
#include "nashann/single.hpp"
#include "nashann/suites.hpp"

using namespace nashann;

namespace {
const SimilarityFn kDot{SimilarityKind::kDotProduct, 0.0};
const std::vector<float> kOne = {1.0f};

// Three attributes with two vectors each, sigma (9,8), (7,6), (5,4).
struct SixVectors {
  VectorSet data = VectorSet::from_rows({{9}, {8}, {7}, {6}, {5}, {4}});
  AttributeTable attrs{3, {{0}, {0}, {1}, {1}, {2}, {2}}};
};

std::vector<double> scores(const Selection& s) { return s.scores; }
}  // namespace

TEST_CASE("top_k basics", "[baselines]") {
  const auto data = VectorSet::from_rows({{5}, {4}, {3}, {2}, {1}});
  const AttributeTable attrs(1, {{0}, {0}, {0}, {0}, {0}});
  auto s = top_k(kOne, 2, data, attrs, kDot);
  REQUIRE(s.ids == std::vector<VectorId>{0, 1});
  REQUIRE(s.source == SelectionSource::kFullScan);
  s = top_k(kOne, 5, data, attrs, kDot);
  REQUIRE(s.ids.size() == 5);
  REQUIRE_FALSE(s.truncated);
  s = top_k(kOne, 7, data, attrs, kDot);
  REQUIRE(s.truncated);
  REQUIRE_THROWS_AS(top_k(kOne, 0, data, attrs, kDot), ConfigError);
}

TEST_CASE("top_k equals a full sort", "[baselines][property]") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto inst = random_instance(rng, 200, 8, 4, 2);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    std::vector<VectorId> all(200);
    std::iota(all.begin(), all.end(), VectorId{0});
    const auto s = top_k(inst.query, 10, inst.data, inst.attrs, inst.fn);
    REQUIRE(s.ids == naive::sort_topk(sims, all, 10));
    REQUIRE(approx_ratio(s.scores, s.scores) == 1.0);
  }
}

TEST_CASE("div_ann on the six-vector instance", "[baselines]") {
  SixVectors x;
  const ExactOracle oracle(x.data, x.attrs, kDot);
  auto s = div_ann(kOne, 4, 1, oracle);
  REQUIRE(s.ids == std::vector<VectorId>{0, 2, 4});
  REQUIRE(s.truncated);
  s = div_ann(kOne, 4, 2, oracle);
  REQUIRE(s.ids == std::vector<VectorId>{0, 1, 2, 3});
  REQUIRE_FALSE(s.truncated);
  s = div_ann(kOne, 3, 5, oracle);
  REQUIRE(s.ids == top_k(kOne, 3, x.data, x.attrs, kDot).ids);
  REQUIRE(distinct_count(div_ann(kOne, 3, 1, oracle).ids, x.attrs) >= 3);
}

TEST_CASE("div_ann equals the capped optimum", "[baselines][property]") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng, 12, 4, 4, 1);
    const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    const std::size_t k = 1 + t % 5, kp = 1 + t % 2;
    const auto s = div_ann(inst.query, k, kp, oracle);
    for (auto c : attribute_counts(s.ids, inst.attrs)) REQUIRE(c <= kp);
    // Best feasible sum by enumeration of all subsets of size <= k.
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << 12); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
      std::vector<std::size_t> cnt(4, 0);
      double sum = 0.0;
      bool ok = true;
      for (VectorId v = 0; v < 12; ++v) {
        if (!(mask >> v & 1)) continue;
        sum += sims[v];
        ok = ok && ++cnt[inst.attrs.attributes_of(v).front()] <= kp;
      }
      if (ok) best = std::max(best, sum);
    }
    double got = 0.0;
    for (double x : s.scores) got += x;
    REQUIRE(got == Catch::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("fetch_union bounds", "[baselines][property]") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 10 + t % 40;
    const auto inst = random_instance(rng, n, 4, 4, 1);
    const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
    const WelfareParams params{t % 2 ? 0.0 : -1.0, 1.0};
    const std::size_t k = 1 + t % 5;
    const auto exact = p_mean_ann(inst.query, k, params, oracle);
    const auto whole = fetch_union(inst.query, k, n, params, inst.data, inst.attrs, inst.fn);
    REQUIRE(whole.objective == Catch::Approx(exact.objective).epsilon(1e-9));
    REQUIRE(whole.source == SelectionSource::kUnionOracle);
    REQUIRE(whole.pool_coverage.has_value());
    const auto small = fetch_union(inst.query, k, std::min(n, 3 * k), params, inst.data,
                                   inst.attrs, inst.fn);
    REQUIRE(small.objective <= exact.objective * (1 + 1e-12));
    const auto tight = fetch_union(inst.query, k, k, params, inst.data, inst.attrs, inst.fn);
    auto a = tight.ids, b = top_k(inst.query, k, inst.data, inst.attrs, inst.fn).ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
  }
  SixVectors x;
  REQUIRE_THROWS_AS(fetch_union(kOne, 4, 3, {}, x.data, x.attrs, kDot), ConfigError);
}

TEST_CASE("fetch_union trades entropy for relevance on skewed data", "[baselines]") {
  const auto data = gaussian_mixture(3000, 16, 20, 3.0, 5);
  const auto attrs = prob_attrs(3000, 6);
  const SimilarityFn fn{SimilarityKind::kReciprocalEuclidean, 0.01};
  const ExactOracle oracle(data, attrs, fn);
  std::mt19937_64 rng(7);
  std::normal_distribution<float> nd(0.0f, 3.0f);
  double e_top = 0, e_fu = 0, r_fu = 0, r_nash = 0;
  const int queries = 30;
  const std::size_t k = 10;
  for (int i = 0; i < queries; ++i) {
    std::vector<float> q(16);
    for (auto& v : q) v = nd(rng);
    const auto top = top_k(q, k, data, attrs, fn);
    const auto fu = fetch_union(q, k, 10 * k, {0.0, 0.01}, data, attrs, fn);
    const auto nash = nash_ann(q, k, {0.0, 0.01}, oracle);
    e_top += entropy(top.ids, attrs);
    e_fu += entropy(fu.ids, attrs);
    r_fu += approx_ratio(scores(fu), scores(top));
    r_nash += approx_ratio(scores(nash), scores(top));
  }
  REQUIRE(e_fu >= e_top);
  REQUIRE(r_fu >= r_nash);
}
