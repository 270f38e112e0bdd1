#include <catch_amalgamated.hpp>

#include <random>
#include <thread>

#include "naive.hpp"
#include "nashann/oracle.hpp"
#include "nashann/suites.hpp"

using namespace nashann;

namespace {
const SimilarityFn kDot{SimilarityKind::kDotProduct, 0.0};

std::vector<VectorId> ids_of(const RankedList& r) {
  std::vector<VectorId> out;
  for (const auto& e : r.entries) out.push_back(e.id);
  return out;
}
}  // namespace

TEST_CASE("exact_topk on a three-member attribute", "[oracle]") {
  // sigma = (0.1, 0.9, 0.5) under a dot product with q = (1).
  const auto data = VectorSet::from_rows({{0.1}, {0.9}, {0.5}, {5.0}});
  AttributeTable attrs(2, {{0}, {0}, {0}, {1}});
  const std::vector<float> q = {1.0f};
  auto r = exact_topk(q, 0, 2, data, attrs, kDot);
  REQUIRE(r.attribute == 0);
  REQUIRE(ids_of(r) == std::vector<VectorId>{1, 2});
  REQUIRE(r.entries[0].score == Catch::Approx(0.9));
  REQUIRE(r.entries[1].score == Catch::Approx(0.5));

  r = exact_topk(q, 0, 10, data, attrs, kDot);
  REQUIRE(ids_of(r) == std::vector<VectorId>{1, 2, 0});

  REQUIRE_THROWS_AS(exact_topk(q, 0, 0, data, attrs, kDot), ConfigError);
  REQUIRE_THROWS_AS(exact_topk(q, 2, 1, data, attrs, kDot), ConfigError);
}

TEST_CASE("empty attribute gives an empty list", "[oracle]") {
  const auto data = VectorSet::from_rows({{1.0}});
  AttributeTable attrs(3, {{0}});
  const std::vector<float> q = {1.0f};
  REQUIRE(exact_topk(q, 2, 4, data, attrs, kDot).entries.empty());
  REQUIRE(alpha_topk(q, 2, 4, data, attrs, kDot, {0.5, 3}).entries.empty());
}

TEST_CASE("ties order by ascending id", "[oracle]") {
  const auto data = VectorSet::from_rows({{1}, {2}, {2}, {1}, {2}});
  AttributeTable attrs(1, {{0}, {0}, {0}, {0}, {0}});
  const std::vector<float> q = {1.0f};
  REQUIRE(ids_of(exact_topk(q, 0, 4, data, attrs, kDot)) ==
          std::vector<VectorId>{1, 2, 4, 0});
}

TEST_CASE("exact_topk matches a full sort on random data", "[oracle][property]") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng() % 1000;
    const std::size_t c = 1 + rng() % 6;
    const auto inst = random_instance(rng, n, 8, c, 2);
    const auto sims = naive::score_all(inst.data, inst.query, inst.fn);
    const std::size_t k = 1 + rng() % 12;
    for (AttributeId a = 0; a < c; ++a) {
      const auto members = inst.attrs.members(a);
      const auto expect = naive::sort_topk(
          sims, std::vector<VectorId>(members.begin(), members.end()), k);
      const auto got = exact_topk(inst.query, a, k, inst.data, inst.attrs, inst.fn);
      REQUIRE(ids_of(got) == expect);
      for (const auto& e : got.entries) {
        REQUIRE(e.score == Catch::Approx(sims[e.id]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("alpha_topk per-rank guarantee", "[oracle][property]") {
  std::mt19937_64 rng(33);
  for (double alpha : {1.0, 0.9, 0.5, 0.1}) {
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 10 + rng() % 60;
      const auto inst = random_instance(rng, n, 4, 1 + rng() % 3, 1);
      const std::size_t k = 1 + rng() % 10;
      for (AttributeId a = 0; a < inst.attrs.num_attributes(); ++a) {
        const auto exact = exact_topk(inst.query, a, k, inst.data, inst.attrs, inst.fn);
        const auto approx = alpha_topk(inst.query, a, k, inst.data, inst.attrs,
                                       inst.fn, {alpha, static_cast<std::uint64_t>(t)});
        REQUIRE(approx.entries.size() == exact.entries.size());
        std::vector<VectorId> seen;
        for (std::size_t i = 0; i < exact.entries.size(); ++i) {
          REQUIRE(approx.entries[i].score >= alpha * exact.entries[i].score);
          if (i > 0) REQUIRE(approx.entries[i].score <= approx.entries[i - 1].score);
          seen.push_back(approx.entries[i].id);
          const auto atb = inst.attrs.attributes_of(approx.entries[i].id);
          REQUIRE(std::find(atb.begin(), atb.end(), a) != atb.end());
        }
        std::sort(seen.begin(), seen.end());
        REQUIRE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
        if (alpha == 1.0) REQUIRE(ids_of(approx) == ids_of(exact));
      }
    }
  }
}

TEST_CASE("alpha_topk is deterministic and thread independent", "[oracle]") {
  std::mt19937_64 rng(44);
  const auto inst = random_instance(rng, 300, 6, 4, 1);
  const AlphaOracle oracle(inst.data, inst.attrs, inst.fn, {0.5, 99});
  std::vector<std::vector<VectorId>> serial;
  for (AttributeId a = 0; a < 4; ++a) serial.push_back(ids_of(oracle.topk(inst.query, a, 8)));
  std::vector<std::vector<VectorId>> threaded(4);
  std::vector<std::thread> ts;
  for (AttributeId a = 0; a < 4; ++a) {
    ts.emplace_back([&, a] { threaded[a] = ids_of(oracle.topk(inst.query, a, 8)); });
  }
  for (auto& t : ts) t.join();
  REQUIRE(serial == threaded);

  // A different seed usually perturbs something.
  const AlphaOracle other(inst.data, inst.attrs, inst.fn, {0.5, 100});
  bool differs = false;
  for (AttributeId a = 0; a < 4; ++a) {
    differs = differs || ids_of(other.topk(inst.query, a, 8)) != serial[a];
  }
  REQUIRE(differs);
}

TEST_CASE("oracle configuration errors", "[oracle]") {
  const auto data = VectorSet::from_rows({{1.0}});
  AttributeTable attrs(1, {{0}});
  AttributeTable wrong(1, {{0}, {0}});
  REQUIRE_THROWS_AS(ExactOracle(data, wrong, kDot), ConfigError);
  REQUIRE_THROWS_AS(AlphaOracle(data, attrs, kDot, {0.0, 1}), ConfigError);
  REQUIRE_THROWS_AS(AlphaOracle(data, attrs, kDot, {1.5, 1}), ConfigError);
  REQUIRE_THROWS_AS(ExactOracle(VectorSet(), AttributeTable(), kDot), ConfigError);
}
