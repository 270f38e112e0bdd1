#pragma once

// Query-batch benchmark runner behind the `run` command.
//
// Metrics are always computed against the exact top-k of each query. Latency
// covers only the selected algorithm (pool fetch included for pool-based
// algorithms) and is measured with a monotonic clock; QPS is the number of
// queries divided by the wall time of the timed batch.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nashann/core.hpp"
#include "nashann/data.hpp"
#include "nashann/metrics.hpp"

namespace nashann {

enum class Algo {
  kAnn,
  kDiv,
  kNash,
  kPMean,
  kMultiNash,
  kMultiPMean,
  kMultiDiv,
  kFetchUnion,
};

std::string to_string(Algo algo);
Algo parse_algo(const std::string& name);
std::vector<std::string> algo_names();

struct RunConfig {
  Algo algo = Algo::kAnn;
  std::size_t k = 10;
  std::vector<double> ps;              // empty: algorithm default
  std::optional<double> eta;           // empty: preset eta
  std::optional<std::size_t> kprime;   // div / multi-div only, default 1
  std::optional<std::size_t> pool_size;  // pool algorithms only, default 200k
  double alpha = 1.0;                  // oracle degradation for div/nash/pmean
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::kNatural;

  // Rejects flags the algorithm does not use and out-of-range values.
  void validate() const;
};

struct QueryRow {
  std::size_t query_id = 0;
  MetricsReport metrics;
  bool truncated = false;
  double latency_us = 0.0;
  std::vector<VectorId> ids;
};

// One pass over all queries at a fixed p.
struct PassResult {
  double p = 0.0;
  std::vector<QueryRow> rows;  // query-id order
  double wall_seconds = 0.0;
  double qps = 0.0;
  double p999_latency_us = 0.0;

  double mean_approx_ratio() const;
  double mean_entropy() const;
};

struct RunResult {
  Algo algo = Algo::kAnn;
  std::size_t k = 0;
  double eta = 0.0;
  std::optional<std::size_t> kprime;
  std::size_t num_classes = 0;
  std::vector<PassResult> passes;  // one per p, in the configured order
};

RunResult run_benchmark(const DatasetBundle& bundle, const RunConfig& config);

// CSV with a fixed header. Without timing the latency column and the
// qps / p99.9 trailer rows are omitted, so the output is deterministic.
void write_csv(std::ostream& out, const RunResult& result, bool with_timing);

std::string csv_header(std::size_t num_classes, bool with_timing);

}  // namespace nashann
