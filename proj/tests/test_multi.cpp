#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "naive.hpp"
#include "nashann/metrics.hpp"
#include "nashann/multi.hpp"
#include "nashann/oracle.hpp"
#include "nashann/single.hpp"
#include "nashann/suites.hpp"

using namespace nashann;

namespace {
const SimilarityFn kDot{SimilarityKind::kDotProduct, 0.0};

double best_log_nsw(const std::vector<double>& sims, const AttributeTable& attrs,
                    std::size_t k) {
  return std::log(naive::best_welfare(sims, attrs, k, 0.0, 1.0));
}
}  // namespace

TEST_CASE("pool construction", "[multi]") {
  std::mt19937_64 rng(1);
  const auto inst = random_instance(rng, 50, 4, 3, 2);
  const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
  std::vector<VectorId> all(50);
  std::iota(all.begin(), all.end(), VectorId{0});
  const auto expect = naive::sort_topk(sims, all, 12);
  const auto pool = fetch_pool(inst.query, 12, inst.data, inst.fn);
  REQUIRE(pool.source == PoolSource::kUnionOracle);
  REQUIRE(pool.entries.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) REQUIRE(pool.entries[i].id == expect[i]);
  const auto full = full_pool(inst.query, inst.data, inst.fn);
  REQUIRE(full.entries.size() == 50);
  REQUIRE(full.source == PoolSource::kFullScan);
  REQUIRE_THROWS_AS(fetch_pool(inst.query, 0, inst.data, inst.fn), ConfigError);
  REQUIRE_THROWS_AS(fetch_pool(inst.query, 3, VectorSet(), inst.fn), ConfigError);
}

TEST_CASE("multi greedy within (1 - 1/e) of optimal", "[multi][property]") {
  std::mt19937_64 rng(2);
  const double factor = 1.0 - 1.0 / std::exp(1.0);
  for (int t = 0; t < 60; ++t) {
    const auto inst = random_instance(rng, 14, 4, 5, 2);
    const auto pool = full_pool(inst.query, inst.data, inst.fn);
    const auto s = multi_nash_ann(3, 1.0, pool, inst.attrs);
    const auto naive_sel = multi_nash_ann(3, 1.0, pool, inst.attrs, GreedyMode::kNaive);
    REQUIRE(s.ids == naive_sel.ids);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    const double opt = best_log_nsw(sims, inst.attrs, 3);
    const double got = log_nsw(s.utilities, 1.0);
    REQUIRE(got >= factor * opt - 1e-12);
    REQUIRE(got <= opt + 1e-9);
    REQUIRE(s.source == SelectionSource::kFullScan);
  }
}

TEST_CASE("multi greedy on single-attribute data agrees with nash_ann", "[multi]") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng, 20, 4, 4, 1);
    const auto pool = full_pool(inst.query, inst.data, inst.fn);
    const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
    const std::size_t k = 1 + t % 5;
    const auto a = multi_nash_ann(k, 1.0, pool, inst.attrs);
    const auto b = nash_ann(inst.query, k, {0.0, 1.0}, oracle);
    REQUIRE(a.objective == Catch::Approx(b.objective).epsilon(1e-9));
  }
}

TEST_CASE("pool of exactly k vectors is returned whole", "[multi]") {
  std::mt19937_64 rng(4);
  const auto inst = random_instance(rng, 30, 4, 4, 3);
  const auto pool = fetch_pool(inst.query, 5, inst.data, inst.fn);
  auto ids = multi_nash_ann(5, 1.0, pool, inst.attrs).ids;
  std::sort(ids.begin(), ids.end());
  std::vector<VectorId> expect;
  for (const auto& e : pool.entries) expect.push_back(e.id);
  std::sort(expect.begin(), expect.end());
  REQUIRE(ids == expect);
  const auto over = multi_nash_ann(8, 1.0, pool, inst.attrs);
  REQUIRE(over.truncated);
  REQUIRE(over.ids.size() == 5);
}

TEST_CASE("multi p-mean", "[multi]") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    // p = 1 with a uniform attribute count per vector is the pool top-k.
    const auto inst = random_instance(rng, 40, 4, 6, 1);
    const auto pool = full_pool(inst.query, inst.data, inst.fn);
    const auto s = multi_p_mean_ann(6, {1.0, 1.0}, pool, inst.attrs);
    std::vector<VectorId> top;
    for (std::size_t i = 0; i < 6; ++i) top.push_back(pool.entries[i].id);
    auto got = s.ids;
    std::sort(got.begin(), got.end());
    std::sort(top.begin(), top.end());
    REQUIRE(got == top);

    const auto one = multi_p_mean_ann(1, {0.5, 1.0}, pool, inst.attrs);
    REQUIRE(one.ids.front() == pool.entries.front().id);
  }

  // Equal similarities, multi-attribute: p = -10 spreads at least as much.
  std::vector<std::vector<double>> rows(18, {1.0});
  std::vector<std::vector<AttributeId>> atb;
  for (int i = 0; i < 18; ++i) {
    atb.push_back({static_cast<AttributeId>(i % 3), static_cast<AttributeId>(3 + (i % 2))});
  }
  const auto data = VectorSet::from_rows(rows);
  const AttributeTable attrs(5, atb);
  const std::vector<float> q = {1.0f};
  const auto pool = full_pool(q, data, kDot);
  const auto egal = multi_p_mean_ann(4, {-10.0, 1.0}, pool, attrs);
  const auto nash = multi_nash_ann(4, 1.0, pool, attrs);
  REQUIRE(entropy(egal.ids, attrs) >= entropy(nash.ids, attrs) - 1e-9);

  // p = 0 goes through the Nash path.
  const auto zero = multi_p_mean_ann(4, {0.0, 1.0}, pool, attrs);
  REQUIRE(zero.ids == nash.ids);
}

TEST_CASE("multi div respects the cap and can stall", "[multi]") {
  // Vectors 0..5 with sigma 6..1; attributes chosen so greedy stalls.
  const auto data = VectorSet::from_rows({{6}, {5}, {4}, {3}, {2}, {1}});
  const AttributeTable attrs(3, {{0, 1}, {0}, {1}, {0, 2}, {1, 2}, {0}});
  const std::vector<float> q = {1.0f};
  const auto pool = full_pool(q, data, kDot);
  const auto s = multi_div_ann(4, 1, pool, attrs);
  // 0 saturates attributes 0 and 1; every other vector touches one of them.
  REQUIRE(s.ids == std::vector<VectorId>{0});
  REQUIRE(s.truncated);

  // Exhaustive check: no 2-subset respects a cap of 1.
  for (VectorId a = 0; a < 6; ++a) {
    for (VectorId b = a + 1; b < 6; ++b) {
      if (a != 0 && b != 0) continue;
      std::vector<int> cnt(3, 0);
      for (VectorId v : {a, b}) {
        for (auto l : attrs.attributes_of(v)) ++cnt[l];
      }
      REQUIRE(*std::max_element(cnt.begin(), cnt.end()) > 1);
    }
  }

  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng, 40, 4, 6, 3);
    const auto p = full_pool(inst.query, inst.data, inst.fn);
    const std::size_t kp = 1 + t % 3;
    const auto sel = multi_div_ann(8, kp, p, inst.attrs);
    for (auto c : attribute_counts(sel.ids, inst.attrs)) REQUIRE(c <= kp);
    // A loose cap reproduces the pool top-k.
    const auto loose = multi_div_ann(5, 5, p, inst.attrs);
    for (std::size_t i = 0; i < 5; ++i) REQUIRE(loose.ids[i] == p.entries[i].id);
  }
}

TEST_CASE("multi solvers reject empty pools", "[multi]") {
  const AttributeTable attrs(1, {{0}});
  const CandidatePool empty;
  REQUIRE_THROWS_AS(multi_nash_ann(1, 1.0, empty, attrs), ConfigError);
  REQUIRE_THROWS_AS(multi_p_mean_ann(1, {0.5, 1.0}, empty, attrs), ConfigError);
  REQUIRE_THROWS_AS(multi_div_ann(1, 1, empty, attrs), ConfigError);
}

TEST_CASE("log NSW at eta = 1 is monotone submodular", "[multi][property]") {
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 2000; ++t) {
    const auto inst = random_instance(rng, 10, 3, 4, 3);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    auto f = [&](const std::vector<VectorId>& ids) {
      const auto u = naive::utils(ids, sims, inst.attrs);
      double s = 0.0;
      for (double x : u) s += std::log(x + 1.0);
      return s / static_cast<double>(u.size());
    };
    std::vector<VectorId> S, T;
    for (VectorId v = 0; v < 9; ++v) {
      if (coin(rng)) {
        T.push_back(v);
        if (coin(rng)) S.push_back(v);
      }
    }
    auto Sw = S, Tw = T;
    Sw.push_back(9);
    Tw.push_back(9);
    REQUIRE(f({}) == 0.0);
    REQUIRE(f(Sw) - f(S) >= f(Tw) - f(T) - 1e-12);
    REQUIRE(f(Tw) - f(T) >= -1e-12);
  }
}
