#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "naive.hpp"
#include "nashann/oracle.hpp"
#include "nashann/reference.hpp"
#include "nashann/single.hpp"
#include "nashann/suites.hpp"

using namespace nashann;

namespace {
ErspInstance ersp(std::size_t n, std::size_t tau,
                  std::vector<std::vector<std::uint32_t>> sets, std::size_t k) {
  ErspInstance e;
  e.universe = n;
  e.tau = tau;
  e.sets = std::move(sets);
  e.k = k;
  return e;
}

double max_log_nsw(const NannsInstance& r, std::size_t k) {
  return brute_force_opt(r.query, k, r.params, r.data, r.attrs, r.fn).value;
}
}  // namespace

TEST_CASE("brute force small cases", "[reference]") {
  const SimilarityFn dot{SimilarityKind::kDotProduct, 0.0};
  const auto data = VectorSet::from_rows({{1}, {3}, {2}});
  const AttributeTable attrs(2, {{0}, {1}, {0}});
  const std::vector<float> q = {1.0f};
  auto r = brute_force_opt(q, 3, {0.0, 1.0}, data, attrs, dot);
  REQUIRE(r.ids == std::vector<VectorId>{0, 1, 2});
  REQUIRE(r.subsets_visited == 1);
  r = brute_force_opt(q, 1, {1.0, 1.0}, data, attrs, dot);
  REQUIRE(r.ids == std::vector<VectorId>{1});
  r = brute_force_opt(q, 2, {0.0, 1.0}, data, attrs, dot);
  REQUIRE(r.value == Catch::Approx(0.5 * (std::log(3.0) + std::log(4.0))));
  REQUIRE(r.welfare == Catch::Approx(std::sqrt(12.0)));
  REQUIRE(r.subsets_visited == 3);
  REQUIRE_THROWS_AS(brute_force_opt(q, 4, {0.0, 1.0}, data, attrs, dot), ConfigError);
}

TEST_CASE("brute force guard", "[reference]") {
  REQUIRE(binomial(40, 20) > kBruteForceLimit);
  REQUIRE(binomial(20, 5) == 15504.0);
  std::vector<double> scores(40, 1.0);
  std::vector<std::vector<AttributeId>> atb(40, {0});
  const AttributeTable attrs(1, atb);
  REQUIRE_THROWS_AS(brute_force_opt(scores, 20, {0.0, 1.0}, attrs), ConfigError);
}

TEST_CASE("brute force agrees with a recursive enumerator", "[reference][property]") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 150; ++t) {
    const auto inst = random_instance(rng, 12, 4, 4, t % 2 ? 1 : 3);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    const double p = std::array<double, 4>{0.0, 0.5, -1.0, 1.0}[t % 4];
    const auto r = brute_force_opt(inst.query, 3, {p, 1.0}, inst.data, inst.attrs, inst.fn);
    REQUIRE(r.welfare == Catch::Approx(naive::best_welfare(sims, inst.attrs, 3, p, 1.0)).epsilon(1e-9));
    if (inst.attrs.single_attribute() && p == 0.0) {
      const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
      const auto s = nash_ann(inst.query, 3, {0.0, 1.0}, oracle);
      REQUIRE(std::log(s.objective) == Catch::Approx(r.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("brute force value is invariant under relabeling", "[reference][property]") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto inst = random_instance(rng, 11, 3, 3, 2);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    std::vector<VectorId> perm(11);
    std::iota(perm.begin(), perm.end(), VectorId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ps(11);
    std::vector<std::vector<AttributeId>> atb(11);
    for (std::size_t i = 0; i < 11; ++i) {
      ps[perm[i]] = sims[i];
      const auto a = inst.attrs.attributes_of(static_cast<VectorId>(i));
      atb[perm[i]].assign(a.begin(), a.end());
    }
    const AttributeTable permuted(3, atb);
    const auto a = brute_force_opt(sims, 4, {0.0, 1.0}, inst.attrs);
    const auto b = brute_force_opt(ps, 4, {0.0, 1.0}, permuted);
    REQUIRE(a.value == Catch::Approx(b.value).epsilon(1e-12));
  }
}

TEST_CASE("reduction instance shape", "[reference]") {
  const auto r = ersp_to_nanns(ersp(4, 2, {{0, 1}, {2, 3}}, 2));
  REQUIRE(r.data.size() == 2);
  REQUIRE(r.data.dim() == 4);
  REQUIRE(r.attrs.num_attributes() == 4);
  REQUIRE(r.params.eta == 1.0);
  REQUIRE(r.threshold == Catch::Approx(2 * 2 * std::log(2.0) / 4));
  const QueryScorer s(r.fn, r.query);
  REQUIRE(s(r.data.row(0)) == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reduction examples", "[reference]") {
  auto a = ersp(4, 2, {{0, 1}, {2, 3}}, 2);
  auto r = ersp_to_nanns(a);
  REQUIRE(has_exact_packing(a));
  REQUIRE(max_log_nsw(r, 2) == Catch::Approx(r.threshold).epsilon(1e-6));
  REQUIRE(max_log_nsw(r, 2) >= r.threshold - 1e-12);

  auto b = ersp(4, 2, {{0, 1}, {1, 2}, {2, 3}}, 2);
  r = ersp_to_nanns(b);
  REQUIRE(has_exact_packing(b));
  REQUIRE(max_log_nsw(r, 2) >= r.threshold - 1e-12);

  auto c = ersp(3, 2, {{0, 1}, {1, 2}}, 2);
  r = ersp_to_nanns(c);
  REQUIRE_FALSE(has_exact_packing(c));
  REQUIRE(max_log_nsw(r, 2) < r.threshold - 1e-12);

  REQUIRE_THROWS_AS(ersp_to_nanns(ersp(3, 2, {{0, 5}}, 1)), ConfigError);
  REQUIRE_THROWS_AS(ersp_to_nanns(ersp(3, 2, {{0}}, 1)), ConfigError);
}

TEST_CASE("random reduction round trips", "[reference][property]") {
  std::mt19937_64 rng(3);
  int packs = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 9;
    const std::size_t tau = 1 + rng() % std::min<std::size_t>(3, n);
    const std::size_t m = 1 + rng() % 7;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(m, 3);
    const auto e = random_ersp(n, tau, m, k, rng());
    const auto r = ersp_to_nanns(e);
    const bool p = has_exact_packing(e);
    packs += p;
    const double v = max_log_nsw(r, k);
    if (p) {
      REQUIRE(v >= r.threshold - 1e-12);
    } else {
      REQUIRE(v < r.threshold - 1e-12);
    }
  }
  REQUIRE(packs > 0);
  REQUIRE(packs < 200);
}

TEST_CASE("log inequality", "[reference]") {
  REQUIRE(1.0 * std::log1p(1.0) == Catch::Approx(std::log(2.0)));
  REQUIRE(0.5 * std::log1p(2.0) == Catch::Approx(0.5493).margin(1e-4));
  REQUIRE(0.5 * std::log(3.0) < std::log(2.0));
  REQUIRE(log_ineq_check(1.0, 100));
  REQUIRE(log_ineq_check(7.3, 10000));
  REQUIRE(log_ineq_check(1e-3, 1000));
}
