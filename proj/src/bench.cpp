#include "nashann/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <thread>

#include "nashann/baselines.hpp"
#include "nashann/multi.hpp"
#include "nashann/oracle.hpp"
#include "nashann/single.hpp"

namespace nashann {

namespace {

constexpr std::pair<Algo, const char*> kAlgoNames[] = {
    {Algo::kAnn, "ann"},
    {Algo::kDiv, "div"},
    {Algo::kNash, "nash"},
    {Algo::kPMean, "pmean"},
    {Algo::kMultiNash, "multi-nash"},
    {Algo::kMultiPMean, "multi-pmean"},
    {Algo::kMultiDiv, "multi-div"},
    {Algo::kFetchUnion, "fetch-union"},
};

bool takes_p(Algo a) {
  return a == Algo::kPMean || a == Algo::kMultiPMean || a == Algo::kFetchUnion;
}
bool takes_kprime(Algo a) { return a == Algo::kDiv || a == Algo::kMultiDiv; }
bool takes_pool(Algo a) {
  return a == Algo::kMultiNash || a == Algo::kMultiPMean ||
         a == Algo::kMultiDiv || a == Algo::kFetchUnion;
}
bool takes_eta(Algo a) { return a != Algo::kAnn && a != Algo::kDiv && a != Algo::kMultiDiv; }
bool takes_alpha(Algo a) {
  return a == Algo::kDiv || a == Algo::kNash || a == Algo::kPMean;
}

// p reported for algorithms without a p parameter; NaN prints as empty.
double fixed_p(Algo a) {
  switch (a) {
    case Algo::kNash:
    case Algo::kMultiNash: return 0.0;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
      (void)t;
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string to_string(Algo algo) {
  for (const auto& [a, name] : kAlgoNames) {
    if (a == algo) return name;
  }
  return "unknown";
}

Algo parse_algo(const std::string& name) {
  for (const auto& [a, n] : kAlgoNames) {
    if (name == n) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::vector<std::string> algo_names() {
  std::vector<std::string> out;
  for (const auto& [a, n] : kAlgoNames) out.emplace_back(n);
  return out;
}

void RunConfig::validate() const {
  const std::string who = "--algo " + to_string(algo);
  if (k == 0) throw ConfigError("--k must be >= 1");
  if (threads == 0) throw ConfigError("--threads must be >= 1");
  if (!ps.empty() && !takes_p(algo)) throw ConfigError("--p is not used by " + who);
  if (kprime && !takes_kprime(algo)) {
    throw ConfigError("--kprime is not used by " + who);
  }
  if (pool_size && !takes_pool(algo)) {
    throw ConfigError("--pool-L is not used by " + who);
  }
  if (eta && !takes_eta(algo)) throw ConfigError("--eta is not used by " + who);
  if (alpha != 1.0 && !takes_alpha(algo)) {
    throw ConfigError("--alpha is not used by " + who);
  }
  if (kprime && *kprime == 0) throw ConfigError("--kprime must be >= 1");
  if (pool_size && *pool_size < k) throw ConfigError("--pool-L must be >= k");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("--alpha must lie in (0, 1]");
  for (double p : ps) WelfareParams{p, 1.0}.validate();
  if (eta) WelfareParams{0.0, *eta}.validate();
}

double PassResult::mean_approx_ratio() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.metrics.approx_ratio;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

double PassResult::mean_entropy() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.metrics.entropy;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

RunResult run_benchmark(const DatasetBundle& bundle, const RunConfig& config) {
  config.validate();
  bundle.validate();
  const auto& data = bundle.base;
  const auto& attrs = bundle.attrs;
  const auto& fn = bundle.preset.fn;
  const Algo algo = config.algo;
  const std::size_t k = config.k;
  const double eta = config.eta.value_or(bundle.preset.eta);
  const std::size_t kprime = config.kprime.value_or(1);
  const std::size_t pool_size = config.pool_size.value_or(200 * k);
  const std::size_t nq = bundle.queries.size();

  RunResult result;
  result.algo = algo;
  result.k = k;
  result.eta = eta;
  if (takes_kprime(algo)) result.kprime = kprime;
  result.num_classes = attrs.has_classes() ? attrs.num_classes() : 0;

  // Exact top-k per query, outside the timed batch.
  std::vector<Selection> optimal(nq);
  parallel_for(nq, config.threads, [&](std::size_t q) {
    optimal[q] = top_k(bundle.queries.row(q), k, data, attrs, fn);
  });

  std::unique_ptr<NeighborOracle> oracle;
  if (takes_alpha(algo)) {
    if (config.alpha == 1.0) {
      oracle = std::make_unique<ExactOracle>(data, attrs, fn);
    } else {
      oracle = std::make_unique<AlphaOracle>(
          data, attrs, fn, AlphaOracleConfig{config.alpha, config.seed});
    }
  }

  std::vector<double> ps = config.ps;
  if (ps.empty()) ps.push_back(takes_p(algo) ? 0.0 : fixed_p(algo));

  for (double p : ps) {
    const WelfareParams params{std::isnan(p) ? 0.0 : p, eta};
    auto solve = [&](std::span<const float> q) -> Selection {
      switch (algo) {
        case Algo::kAnn: return top_k(q, k, data, attrs, fn, params);
        case Algo::kDiv: return div_ann(q, k, kprime, *oracle, params);
        case Algo::kNash: return nash_ann(q, k, params, *oracle);
        case Algo::kPMean: return p_mean_ann(q, k, params, *oracle);
        case Algo::kMultiNash:
          return multi_nash_ann(k, eta, fetch_pool(q, pool_size, data, fn), attrs);
        case Algo::kMultiPMean:
          return multi_p_mean_ann(k, params, fetch_pool(q, pool_size, data, fn),
                                  attrs);
        case Algo::kMultiDiv:
          return multi_div_ann(k, kprime, fetch_pool(q, pool_size, data, fn),
                               attrs, params);
        case Algo::kFetchUnion:
          return fetch_union(q, k, pool_size, params, data, attrs, fn);
      }
      throw ConfigError("unhandled algorithm");
    };

    PassResult pass;
    pass.p = p;
    pass.rows.resize(nq);
    std::vector<Selection> selections(nq);
    const auto start = std::chrono::steady_clock::now();
    parallel_for(nq, config.threads, [&](std::size_t q) {
      const auto t0 = std::chrono::steady_clock::now();
      selections[q] = solve(bundle.queries.row(q));
      const auto t1 = std::chrono::steady_clock::now();
      pass.rows[q].latency_us =
          std::chrono::duration<double, std::micro>(t1 - t0).count();
    });
    pass.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    std::vector<double> latencies;
    latencies.reserve(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      auto& row = pass.rows[q];
      const Selection& s = selections[q];
      row.query_id = q;
      row.truncated = s.truncated;
      row.ids = s.ids;
      row.metrics = evaluate(s.ids, s.scores, optimal[q].ids, optimal[q].scores,
                             attrs, config.log_base);
      latencies.push_back(row.latency_us);
    }
    pass.qps = pass.wall_seconds > 0.0 ? static_cast<double>(nq) / pass.wall_seconds
                                       : 0.0;
    pass.p999_latency_us = latencies.empty() ? 0.0 : quantile(latencies, 0.999);
    result.passes.push_back(std::move(pass));
  }
  return result;
}

std::string csv_header(std::size_t num_classes, bool with_timing) {
  std::string h =
      "query_id,algo,k,p,eta,kprime,approx_ratio,recall,entropy,"
      "inverse_simpson,distinct_count";
  for (std::size_t i = 0; i < num_classes; ++i) {
    h += ",entropy_class" + std::to_string(i) + ",inverse_simpson_class" +
         std::to_string(i);
  }
  h += ",truncated";
  if (with_timing) h += ",latency_us";
  return h;
}

void write_csv(std::ostream& out, const RunResult& result, bool with_timing) {
  out << csv_header(result.num_classes, with_timing) << '\n';
  const std::string kp = result.kprime ? std::to_string(*result.kprime) : "";
  for (const auto& pass : result.passes) {
    const std::string prefix = to_string(result.algo) + "," +
                               std::to_string(result.k) + "," + num(pass.p) +
                               "," + num(result.eta) + "," + kp;
    for (const auto& row : pass.rows) {
      const auto& m = row.metrics;
      out << row.query_id << ',' << prefix << ',' << num(m.approx_ratio) << ','
          << num(m.recall) << ',' << num(m.entropy) << ','
          << num(m.inverse_simpson) << ',' << m.distinct_count;
      for (std::size_t i = 0; i < result.num_classes; ++i) {
        const auto& pc = m.per_class.at(i);
        out << ',' << num(pc.entropy) << ',' << num(pc.inverse_simpson);
      }
      out << ',' << (row.truncated ? 1 : 0);
      if (with_timing) out << ',' << num(row.latency_us);
      out << '\n';
    }

    // Summary rows: mean, sample stddev and standard error over queries.
    const std::size_t columns = 5 + 2 * result.num_classes + 1;
    std::vector<std::vector<double>> cols(columns);
    for (const auto& row : pass.rows) {
      const auto& m = row.metrics;
      std::size_t c = 0;
      cols[c++].push_back(m.approx_ratio);
      cols[c++].push_back(m.recall);
      cols[c++].push_back(m.entropy);
      cols[c++].push_back(m.inverse_simpson);
      cols[c++].push_back(static_cast<double>(m.distinct_count));
      for (std::size_t i = 0; i < result.num_classes; ++i) {
        cols[c++].push_back(m.per_class.at(i).entropy);
        cols[c++].push_back(m.per_class.at(i).inverse_simpson);
      }
      cols[c++].push_back(row.truncated ? 1.0 : 0.0);
    }
    std::vector<Summary> sums;
    for (const auto& c : cols) sums.push_back(summarize(c));
    for (const char* label : {"mean", "stddev", "stderr"}) {
      out << label << ',' << prefix;
      for (const auto& s : sums) {
        const std::string l = label;
        out << ',' << num(l == "mean" ? s.mean : l == "stddev" ? s.stddev : s.std_error);
      }
      if (with_timing) {
        std::vector<double> lat;
        for (const auto& row : pass.rows) lat.push_back(row.latency_us);
        const Summary s = summarize(lat);
        const std::string l = label;
        out << ',' << num(l == "mean" ? s.mean : l == "stddev" ? s.stddev : s.std_error);
      }
      out << '\n';
    }
    if (with_timing) {
      out << "qps," << prefix << ',' << num(pass.qps) << '\n';
      out << "p999_latency_us," << prefix << ',' << num(pass.p999_latency_us)
          << '\n';
    }
  }
}

}  // namespace nashann
