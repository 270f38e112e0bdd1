#include "nashann/suites.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nashann/multi.hpp"
#include "nashann/oracle.hpp"
#include "nashann/reference.hpp"
#include "nashann/single.hpp"

namespace nashann {

namespace {

constexpr std::array<double, 3> kEtas = {0.01, 1.0, 50.0};
constexpr std::array<double, 5> kPowers = {-10.0, -1.0, -0.5, 0.5, 1.0};
constexpr std::array<double, 6> kAllPowers = {0.0, -10.0, -1.0, -0.5, 0.5, 1.0};

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool rel_close(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

class Recorder {
 public:
  explicit Recorder(std::string name) : start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
  }

  void trial() { ++result_.trials; }

  template <typename... Parts>
  void fail(const Parts&... parts) {
    ++result_.violations;
    if (result_.first_failure.empty()) {
      std::ostringstream os;
      os.precision(17);
      (os << ... << parts);
      result_.first_failure = os.str();
    }
  }

  SuiteResult finish() {
    result_.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
    return result_;
  }

 private:
  SuiteResult result_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> scores_of(const RandomInstance& inst) {
  const QueryScorer score(inst.fn, inst.query);
  std::vector<double> s(inst.data.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = score(inst.data.row(i));
  return s;
}

std::string describe(std::size_t trial, std::size_t n, std::size_t c,
                     std::size_t k, const WelfareParams& params) {
  std::ostringstream os;
  os << "trial " << trial << " (n=" << n << ", c=" << c << ", k=" << k
     << ", p=" << params.p << ", eta=" << params.eta << ")";
  return os.str();
}

// Single-attribute solver vs brute force, shared by the optimality suites.
void check_single_optimal(Recorder& rec, std::mt19937_64& rng,
                          std::size_t trial, const WelfareParams& params) {
  const std::size_t k = uniform(rng, 1, 5);
  const std::size_t n = uniform(rng, k, 20);
  const std::size_t c = uniform(rng, 1, 6);
  const auto inst = random_instance(rng, n, 4, c, 1);
  const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
  const Selection sel = p_mean_ann(inst.query, k, params, oracle);
  const auto best = brute_force_opt(inst.query, k, params, inst.data,
                                    inst.attrs, inst.fn);
  rec.trial();
  if (sel.truncated || sel.ids.size() != k) {
    rec.fail(describe(trial, n, c, k, params), ": solver returned ",
             sel.ids.size(), " ids");
  } else if (!rel_close(sel.objective, best.welfare, 1e-9)) {
    rec.fail(describe(trial, n, c, k, params), ": solver ", sel.objective,
             " vs optimum ", best.welfare);
  }
}

}  // namespace

RandomInstance random_instance(std::mt19937_64& rng, std::size_t n,
                               std::size_t d, std::size_t c,
                               std::size_t max_attrs) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<float> values(n * d);
  for (float& x : values) x = static_cast<float>(normal(rng));
  std::vector<float> query(d);
  for (float& x : query) x = static_cast<float>(normal(rng));

  max_attrs = std::max<std::size_t>(1, std::min(max_attrs, c));
  std::vector<AttributeId> ids(c);
  std::iota(ids.begin(), ids.end(), AttributeId{0});
  std::vector<std::vector<AttributeId>> atb(n);
  for (auto& list : atb) {
    const std::size_t count = max_attrs == 1 ? 1 : uniform(rng, 1, max_attrs);
    std::shuffle(ids.begin(), ids.end(), rng);
    list.assign(ids.begin(), ids.begin() + static_cast<long>(count));
  }

  SimilarityFn fn;
  switch (uniform(rng, 0, 2)) {
    case 0: fn = {SimilarityKind::kOnePlusCosine, 0.0}; break;
    case 1:
      fn = {SimilarityKind::kReciprocalEuclidean,
            std::uniform_real_distribution<double>(0.01, 1.0)(rng)};
      break;
    default: fn = {SimilarityKind::kDotProduct, 0.0}; break;
  }
  return {VectorSet(n, d, std::move(values)), AttributeTable(c, std::move(atb)),
          std::move(query), fn};
}

SuiteResult suite_nash_optimality(const SuiteOptions& opts) {
  Recorder rec("nash-optimality");
  std::mt19937_64 rng(opts.seed);
  const std::size_t trials = opts.trials ? opts.trials : 500;
  for (std::size_t t = 0; t < trials; ++t) {
    check_single_optimal(rec, rng, t, {0.0, kEtas[t % kEtas.size()]});
  }
  return rec.finish();
}

SuiteResult suite_pmean_optimality(const SuiteOptions& opts) {
  Recorder rec("pmean-optimality");
  std::mt19937_64 rng(opts.seed + 1);
  const std::size_t trials = opts.trials ? opts.trials : 500;
  for (std::size_t t = 0; t < trials; ++t) {
    const double p = kPowers[t % kPowers.size()];
    const double eta = kEtas[(t / kPowers.size()) % kEtas.size()];
    check_single_optimal(rec, rng, t, {p, eta});
  }
  return rec.finish();
}

SuiteResult suite_alpha(const SuiteOptions& opts) {
  Recorder rec("alpha-approximation");
  std::mt19937_64 rng(opts.seed + 2);
  const std::size_t trials = opts.trials ? opts.trials : 200;
  for (double alpha : opts.alphas) {
    for (std::size_t t = 0; t < trials; ++t) {
      const WelfareParams params{kAllPowers[t % kAllPowers.size()],
                                 kEtas[(t / kAllPowers.size()) % kEtas.size()]};
      const std::size_t k = uniform(rng, 1, 5);
      const std::size_t n = uniform(rng, k, 18);
      const std::size_t c = uniform(rng, 1, 5);
      const auto inst = random_instance(rng, n, 4, c, 1);
      const AlphaOracle oracle(inst.data, inst.attrs, inst.fn,
                               {alpha, opts.seed * 7919 + t});
      const Selection sel = p_mean_ann(inst.query, k, params, oracle);
      const auto best = brute_force_opt(inst.query, k, params, inst.data,
                                        inst.attrs, inst.fn);
      rec.trial();
      if (sel.objective < alpha * best.welfare * (1.0 - 1e-12)) {
        rec.fail(describe(t, n, c, k, params), " alpha=", alpha, ": ",
                 sel.objective, " < alpha * ", best.welfare);
      }
    }
  }
  return rec.finish();
}

SuiteResult suite_greedy_bound(const SuiteOptions& opts) {
  Recorder rec("greedy-bound");
  std::mt19937_64 rng(opts.seed + 3);
  const std::size_t trials = opts.trials ? opts.trials : 300;
  const double factor = 1.0 - 1.0 / std::exp(1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = uniform(rng, 1, 4);
    const std::size_t n = uniform(rng, k, 16);
    const std::size_t c = uniform(rng, 1, 6);
    const auto inst = random_instance(rng, n, 4, c, 3);
    const auto pool = full_pool(inst.query, inst.data, inst.fn);
    const Selection lazy = multi_nash_ann(k, 1.0, pool, inst.attrs);
    const Selection naive =
        multi_nash_ann(k, 1.0, pool, inst.attrs, GreedyMode::kNaive);
    const auto best = brute_force_opt(inst.query, k, {0.0, 1.0}, inst.data,
                                      inst.attrs, inst.fn);
    const double got = log_nsw(lazy.utilities, 1.0);
    rec.trial();
    const auto where = describe(t, n, c, k, {0.0, 1.0});
    if (lazy.ids != naive.ids) {
      rec.fail(where, ": lazy and naive greedy disagree");
    } else if (factor * best.value > got + 1e-12) {
      rec.fail(where, ": log NSW ", got, " below (1-1/e) * ", best.value);
    } else if (got > best.value + 1e-9) {
      rec.fail(where, ": log NSW ", got, " exceeds optimum ", best.value);
    }
  }
  return rec.finish();
}

SuiteResult suite_marginals(const SuiteOptions& opts) {
  Recorder rec("decreasing-marginals");
  std::mt19937_64 rng(opts.seed + 4);
  const std::size_t trials = opts.trials ? opts.trials : 10000;
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t m = uniform(rng, 2, 20);
    std::vector<double> sims(m);
    for (double& s : sims) s = expo(rng);
    // Occasional duplicates and zeros.
    if (t % 5 == 0) sims[uniform(rng, 0, m - 1)] = sims[0];
    if (t % 7 == 0) sims[uniform(rng, 0, m - 1)] = 0.0;
    std::sort(sims.begin(), sims.end(), std::greater<>());
    const double eta = std::pow(10.0, -4.0 + 6.0 * unit(rng));
    const std::array<WelfareParams, 3> paths = {
        WelfareParams{0.0, eta},
        WelfareParams{std::max(1e-3, unit(rng)), eta},
        WelfareParams{-10.0 * std::max(1e-3, unit(rng)), eta}};
    for (const auto& params : paths) {
      rec.trial();
      double w = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double g = marginal_gain(w, sims[i], params);
        if (i > 0) {
          // Rounding floor for the power paths: a few ulps of the largest
          // power term involved.
          const double floor =
              params.is_nash() ? 0.0
                               : 8.0 * eps *
                                     std::max(pow_pos(w - sims[i - 1] + eta, params.p),
                                              pow_pos(w + sims[i] + eta, params.p));
          const double slack = 1e-12 * std::max(std::abs(g), std::abs(prev)) + floor;
          const bool ok = params.p < 0.0 ? g >= prev - slack : g <= prev + slack;
          if (!ok) {
            rec.fail("trial ", t, " p=", params.p, " eta=", eta, " rank ", i,
                     ": marginal ", g, " after ", prev);
            break;
          }
        }
        prev = g;
        w += sims[i];
      }
    }
  }
  return rec.finish();
}

SuiteResult suite_submodularity(const SuiteOptions& opts) {
  Recorder rec("submodularity");
  std::mt19937_64 rng(opts.seed + 5);
  const std::size_t trials = opts.trials ? opts.trials : 10000;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = uniform(rng, 2, 12);
    const std::size_t c = uniform(rng, 1, 6);
    const auto inst = random_instance(rng, n, 3, c, 3);
    const auto sims = scores_of(inst);
    auto f = [&](const std::vector<VectorId>& ids) {
      std::vector<double> s;
      for (VectorId id : ids) s.push_back(sims[id]);
      return log_nsw(utilities_from_scores(ids, s, inst.attrs), 1.0);
    };
    // Random T, S within T, w outside T.
    std::vector<VectorId> order(n);
    std::iota(order.begin(), order.end(), VectorId{0});
    std::shuffle(order.begin(), order.end(), rng);
    const VectorId w = order.back();
    std::vector<VectorId> T, S;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (coin(rng)) {
        T.push_back(order[i]);
        if (coin(rng)) S.push_back(order[i]);
      }
    }
    auto plus = [](std::vector<VectorId> v, VectorId x) {
      v.push_back(x);
      return v;
    };
    rec.trial();
    const double fS = f(S), fT = f(T);
    const double gS = f(plus(S, w)) - fS;
    const double gT = f(plus(T, w)) - fT;
    if (f({}) != 0.0) {
      rec.fail("trial ", t, ": f(empty) = ", f({}));
    } else if (fT < fS - 1e-12) {
      rec.fail("trial ", t, ": not monotone, f(T) ", fT, " < f(S) ", fS);
    } else if (gT < -1e-12) {
      rec.fail("trial ", t, ": negative marginal ", gT);
    } else if (gS < gT - 1e-12) {
      rec.fail("trial ", t, ": not submodular, gain on S ", gS, " < gain on T ",
               gT);
    }
  }
  return rec.finish();
}

SuiteResult suite_log_inequality(const SuiteOptions& opts) {
  Recorder rec("log-inequality");
  std::mt19937_64 rng(opts.seed + 6);
  const std::size_t trials = opts.trials ? opts.trials : 10000;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const double a = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double x = a * std::max(1e-12, 1.0 - unit(rng));  // (0, a]
    const double lhs = x * std::log1p(a / x);
    const double rhs = a * std::log(2.0);
    rec.trial();
    if (lhs > rhs + 1e-12) {
      rec.fail("a=", a, " x=", x, ": ", lhs, " > ", rhs);
    } else if (x < a && lhs == rhs && a - x > 1e-6 * a) {
      rec.fail("a=", a, " x=", x, ": equality away from x = a");
    }
  }
  for (double a : {1.0, 7.3, 1e-3, 250.0}) {
    rec.trial();
    if (!log_ineq_check(a, 10000)) rec.fail("grid sweep failed for a=", a);
  }
  return rec.finish();
}

SuiteResult suite_examples(const SuiteOptions& opts) {
  Recorder rec("examples");
  std::mt19937_64 rng(opts.seed + 7);
  const std::size_t trials = opts.trials ? opts.trials : 200;
  const SimilarityFn dot{SimilarityKind::kDotProduct, 0.0};
  for (std::size_t t = 0; t < trials; ++t) {
    const double eta = kEtas[t % kEtas.size()];
    const std::size_t k = uniform(rng, 1, 6);
    const bool diversity = t % 2 == 0;
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<AttributeId>> atb;
    std::size_t c = 0;
    AttributeId star = 0;
    if (diversity) {
      // sigma = 1 everywhere, c >= k, every attribute populated.
      c = uniform(rng, k, k + 4);
      const std::size_t n = uniform(rng, c, c + 8);
      for (std::size_t i = 0; i < n; ++i) {
        rows.push_back({1.0, 0.0});
        atb.push_back({static_cast<AttributeId>(
            i < c ? i : uniform(rng, 0, c - 1))});
      }
    } else {
      // sigma = 1 on D_star only, |D_star| >= k.
      c = uniform(rng, 2, 6);
      star = static_cast<AttributeId>(uniform(rng, 0, c - 1));
      const std::size_t in_star = uniform(rng, k, k + 4);
      const std::size_t others = uniform(rng, 1, 12);
      for (std::size_t i = 0; i < in_star; ++i) {
        rows.push_back({1.0, 0.0});
        atb.push_back({star});
      }
      for (std::size_t i = 0; i < others; ++i) {
        rows.push_back({0.0, 1.0});
        AttributeId a = static_cast<AttributeId>(uniform(rng, 0, c - 2));
        if (a >= star) ++a;
        atb.push_back({a});
      }
    }
    const auto data = VectorSet::from_rows(rows);
    const AttributeTable attrs(c, std::move(atb));
    const std::vector<float> query = {1.0f, 0.0f};
    const ExactOracle oracle(data, attrs, dot);
    const Selection sel = nash_ann(query, k, {0.0, eta}, oracle);
    const auto best = brute_force_opt(query, k, {0.0, eta}, data, attrs, dot);
    rec.trial();
    for (const auto* ids : {&sel.ids, &best.ids}) {
      std::vector<std::size_t> counts(c, 0);
      for (VectorId v : *ids) ++counts[attrs.attributes_of(v).front()];
      if (diversity) {
        if (*std::max_element(counts.begin(), counts.end()) > 1) {
          rec.fail("example 1 trial ", t, ": an attribute got two vectors");
          break;
        }
      } else if (counts[star] != k) {
        rec.fail("example 2 trial ", t, ": only ", counts[star], " of ", k,
                 " from the relevant attribute");
        break;
      }
    }
  }
  return rec.finish();
}

SuiteResult suite_size_match(const SuiteOptions& opts) {
  Recorder rec("size-match");
  std::mt19937_64 rng(opts.seed + 8);
  const std::size_t trials = opts.trials ? opts.trials : 300;
  for (std::size_t t = 0; t < trials; ++t) {
    const WelfareParams params{kAllPowers[t % kAllPowers.size()],
                               kEtas[(t / kAllPowers.size()) % kEtas.size()]};
    const std::size_t k = uniform(rng, 1, 4);
    const std::size_t n = uniform(rng, k, 14);
    const std::size_t c = uniform(rng, 1, 4);
    const auto inst = random_instance(rng, n, 4, c, 1);
    const ExactOracle oracle(inst.data, inst.attrs, inst.fn);
    const Selection sel = p_mean_ann(inst.query, k, params, oracle);
    const auto sims = scores_of(inst);
    std::vector<std::size_t> target(c, 0);
    for (VectorId v : sel.ids) ++target[inst.attrs.attributes_of(v).front()];

    rec.trial();
    // Every k-subset via a selection mask.
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(k), 1);
    std::sort(mask.begin(), mask.end());
    do {
      std::vector<VectorId> ids;
      std::vector<double> s;
      std::vector<std::size_t> counts(c, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        ids.push_back(static_cast<VectorId>(i));
        s.push_back(sims[i]);
        ++counts[inst.attrs.attributes_of(static_cast<VectorId>(i)).front()];
      }
      if (counts != target) continue;
      const double value =
          welfare(utilities_from_scores(ids, s, inst.attrs), params);
      if (value > sel.objective * (1.0 + 1e-9)) {
        rec.fail(describe(t, n, c, k, params), ": count-matched subset ", value,
                 " beats solver ", sel.objective);
        break;
      }
    } while (std::next_permutation(mask.begin(), mask.end()));
  }
  return rec.finish();
}

SuiteResult suite_ersp(const SuiteOptions& opts) {
  Recorder rec("ersp-reduction");
  std::mt19937_64 rng(opts.seed + 9);
  const std::size_t trials = opts.trials ? opts.trials : 100;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t universe = uniform(rng, 2, 12);
    const std::size_t tau = uniform(rng, 1, std::min<std::size_t>(3, universe));
    const std::size_t m = uniform(rng, 1, 8);
    const std::size_t k = uniform(rng, 1, std::min<std::size_t>(m, 4));
    ErspInstance inst = random_ersp(universe, tau, m, k, rng());
    // Plant a packing in half of the instances when one fits.
    if (t % 2 == 0 && tau * k <= universe) {
      std::vector<std::uint32_t> elems(universe);
      std::iota(elems.begin(), elems.end(), 0u);
      std::shuffle(elems.begin(), elems.end(), rng);
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::uint32_t> s(elems.begin() + static_cast<long>(j * tau),
                                     elems.begin() + static_cast<long>((j + 1) * tau));
        std::sort(s.begin(), s.end());
        inst.sets[j] = std::move(s);
      }
      std::shuffle(inst.sets.begin(), inst.sets.end(), rng);
    }
    const auto built = ersp_to_nanns(inst);
    const auto best = brute_force_opt(built.query, inst.k, built.params,
                                      built.data, built.attrs, built.fn);
    const bool packs = has_exact_packing(inst);
    const bool reaches = best.value >= built.threshold - 1e-12;
    rec.trial();
    if (packs != reaches) {
      rec.fail("trial ", t, " (n=", universe, ", tau=", tau, ", m=", m,
               ", k=", k, "): packing=", packs, " but max log NSW ", best.value,
               " vs W ", built.threshold);
    }
  }
  return rec.finish();
}

const std::vector<SuiteEntry>& all_suites() {
  static const std::vector<SuiteEntry> suites = {
      {"nash", suite_nash_optimality},   {"pmean", suite_pmean_optimality},
      {"alpha", suite_alpha},            {"greedy", suite_greedy_bound},
      {"marginals", suite_marginals},    {"submodular", suite_submodularity},
      {"loginequality", suite_log_inequality},
      {"examples", suite_examples},      {"sizematch", suite_size_match},
      {"ersp", suite_ersp},
  };
  return suites;
}

}  // namespace nashann
