// nashann command line: attribute generation, benchmark runs and the
// randomized verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nashann/bench.hpp"
#include "nashann/core.hpp"
#include "nashann/data.hpp"
#include "nashann/oracle.hpp"
#include "nashann/suites.hpp"

namespace {

using namespace nashann;

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// key=value lines, '#' comments, blank lines ignored.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Fills options not given on the command line from the config file.
void apply_config(CLI::App& app, const std::map<std::string, std::string>& cfg) {
  for (const auto& [key, value] : cfg) {
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    std::string rest = value;
    for (;;) {
      const auto comma = rest.find(',');
      opt->add_result(rest.substr(0, comma));
      if (comma == std::string::npos) break;
      rest.erase(0, comma + 1);
    }
    opt->run_callback();
  }
}

struct RunFlags {
  std::string data, queries, attrs, out = "-", json, config;
  std::string preset = "default";
  std::string similarity;
  std::optional<double> delta;
  std::string algo = "ann";
  std::size_t k = 10;
  std::vector<double> ps;
  std::optional<double> eta;
  std::optional<std::size_t> kprime, pool_size, max_queries;
  double alpha = 1.0;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  bool log2 = false;
  bool no_timing = false;
};

AttributeTable restrict_rows(const AttributeTable& attrs,
                             const std::vector<VectorId>& rows) {
  std::vector<std::vector<AttributeId>> atb;
  atb.reserve(rows.size());
  for (VectorId r : rows) {
    const auto a = attrs.attributes_of(r);
    atb.emplace_back(a.begin(), a.end());
  }
  const auto sizes = attrs.class_sizes();
  return AttributeTable(attrs.num_attributes(), std::move(atb),
                        std::vector<std::size_t>(sizes.begin(), sizes.end()));
}

int cmd_run(const RunFlags& f) {
  DatasetBundle bundle;
  bundle.preset = preset(f.preset);
  if (!f.similarity.empty()) bundle.preset.fn.kind = parse_similarity_kind(f.similarity);
  if (f.delta) bundle.preset.fn.delta = *f.delta;

  VectorSet all = read_vectors(f.data);
  AttributeTable attrs = read_attrs(f.attrs);
  if (attrs.num_vectors() != all.size()) {
    throw ConfigError("attribute file covers " + std::to_string(attrs.num_vectors()) +
                      " vectors, dataset has " + std::to_string(all.size()));
  }
  if (!f.queries.empty()) {
    bundle.base = std::move(all);
    bundle.queries = read_vectors(f.queries);
    bundle.attrs = std::move(attrs);
  } else {
    Split split = split_dataset(all, f.seed);
    bundle.base = std::move(split.base);
    bundle.queries = std::move(split.queries);
    bundle.attrs = restrict_rows(attrs, split.base_ids);
  }
  if (f.max_queries && *f.max_queries < bundle.queries.size()) {
    std::vector<VectorId> keep(*f.max_queries);
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<VectorId>(i);
    bundle.queries = bundle.queries.gather(keep);
  }

  RunConfig config;
  config.algo = parse_algo(f.algo);
  config.k = f.k;
  config.ps = f.ps;
  config.eta = f.eta;
  config.kprime = f.kprime;
  config.pool_size = f.pool_size;
  config.alpha = f.alpha;
  config.threads = f.threads;
  config.seed = f.seed;
  config.log_base = f.log2 ? LogBase::kTwo : LogBase::kNatural;

  const RunResult result = run_benchmark(bundle, config);
  if (f.out == "-") {
    write_csv(std::cout, result, !f.no_timing);
  } else {
    std::ofstream out(f.out);
    if (!out) throw IoError("cannot write " + f.out);
    write_csv(out, result, !f.no_timing);
    if (!out) throw IoError("write failed for " + f.out);
  }

  if (!f.json.empty()) {
    nlohmann::json j;
    j["algo"] = to_string(result.algo);
    j["k"] = result.k;
    j["eta"] = result.eta;
    j["queries"] = bundle.queries.size();
    for (const auto& pass : result.passes) {
      nlohmann::json p;
      if (!std::isnan(pass.p)) p["p"] = pass.p;
      p["mean_approx_ratio"] = pass.mean_approx_ratio();
      p["mean_entropy"] = pass.mean_entropy();
      if (!f.no_timing) {
        p["qps"] = pass.qps;
        p["p999_latency_us"] = pass.p999_latency_us;
      }
      j["passes"].push_back(p);
    }
    std::ofstream out(f.json);
    if (!out) throw IoError("cannot write " + f.json);
    out << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_verify(const std::string& suite, const SuiteOptions& opts) {
  bool any = false;
  bool ok = true;
  for (const auto& entry : all_suites()) {
    if (suite != "all" && suite != entry.name) continue;
    any = true;
    const SuiteResult r = entry.run(opts);
    std::printf("%-14s %s  trials=%zu violations=%zu  %.2fs\n", r.name.c_str(),
                r.passed() ? "PASS" : "FAIL", r.trials, r.violations, r.seconds);
    if (!r.passed()) {
      ok = false;
      if (!r.first_failure.empty()) {
        std::printf("  first failure: %s\n", r.first_failure.c_str());
      }
    }
  }
  if (!any) throw ConfigError("unknown suite '" + suite + "'");
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Welfare-based diverse nearest neighbor search toolkit"};
  app.require_subcommand(1);

  // gen-attrs
  auto* gen = app.add_subcommand("gen-attrs", "Assign attributes to a dataset");
  std::string ga_data, ga_out, ga_mode = "clus";
  std::size_t ga_c = 20, ga_threads = 1;
  std::optional<std::size_t> ga_chunks;
  std::uint64_t ga_seed = 0;
  gen->add_option("--data", ga_data, "Input .fvecs/.bvecs")->required();
  gen->add_option("--mode", ga_mode, "clus or prob")
      ->check(CLI::IsMember({"clus", "prob"}));
  gen->add_option("--c", ga_c, "Clusters per class (clus mode)");
  gen->add_option("--chunks", ga_chunks, "Cluster each of m dimension slices");
  gen->add_option("--seed", ga_seed, "Random seed");
  gen->add_option("--threads", ga_threads, "k-means threads");
  gen->add_option("--out", ga_out, "Output attribute file")->required();

  // gen-synth
  auto* synth = app.add_subcommand("gen-synth", "Write a Gaussian-mixture dataset");
  std::size_t gs_n = 10000, gs_d = 32, gs_centers = 50;
  double gs_scale = 4.0;
  std::uint64_t gs_seed = 0;
  std::string gs_out;
  synth->add_option("--n", gs_n, "Number of vectors");
  synth->add_option("--d", gs_d, "Dimension");
  synth->add_option("--centers", gs_centers, "Mixture components");
  synth->add_option("--scale", gs_scale, "Standard deviation of the centres");
  synth->add_option("--seed", gs_seed, "Random seed");
  synth->add_option("--out", gs_out, "Output .fvecs")->required();

  // run
  auto* run = app.add_subcommand("run", "Run an algorithm over a query batch");
  RunFlags rf;
  run->add_option("--config", rf.config, "key=value file; flags take precedence");
  run->add_option("--data", rf.data, "Base vectors (.fvecs/.bvecs)");
  run->add_option("--queries", rf.queries, "Query vectors; default: 4:1 split of --data");
  run->add_option("--attrs", rf.attrs, "Attribute file");
  run->add_option("--preset", rf.preset, "Similarity/eta defaults")
      ->check(CLI::IsMember(preset_names()));
  run->add_option("--similarity", rf.similarity, "cosine, euclidean or dot");
  run->add_option("--delta", rf.delta, "Euclidean similarity offset");
  run->add_option("--algo", rf.algo, "Algorithm")->check(CLI::IsMember(algo_names()));
  run->add_option("--k", rf.k, "Result size");
  run->add_option("--p", rf.ps, "Welfare exponent(s), comma separated")->delimiter(',');
  run->add_option("--eta", rf.eta, "Smoothing constant");
  run->add_option("--kprime", rf.kprime, "Per-attribute cap (div, multi-div)");
  run->add_option("--pool-L", rf.pool_size, "Candidate pool size (default 200k)");
  run->add_option("--alpha", rf.alpha, "Degraded oracle factor in (0, 1]");
  run->add_option("--threads", rf.threads, "Worker threads");
  run->add_option("--seed", rf.seed, "Seed for splits and degraded oracles");
  run->add_option("--max-queries", rf.max_queries, "Use only the first N queries");
  run->add_flag("--log2", rf.log2, "Entropy in bits");
  run->add_flag("--no-timing", rf.no_timing, "Omit latency and QPS output");
  run->add_option("--out", rf.out, "CSV path, '-' for stdout");
  run->add_option("--json", rf.json, "Also write a JSON summary");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the randomized property suites");
  std::string vf_suite = "all";
  SuiteOptions vf_opts;
  std::vector<std::string> suite_names = {"all"};
  for (const auto& e : all_suites()) suite_names.push_back(e.name);
  verify->add_option("--suite", vf_suite, "Suite name or 'all'")
      ->check(CLI::IsMember(suite_names));
  verify->add_option("--trials", vf_opts.trials, "Trials per suite (0: default)");
  verify->add_option("--alpha", vf_opts.alphas, "Oracle factors for the alpha suite")
      ->delimiter(',');
  verify->add_option("--seed", vf_opts.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      const VectorSet data = read_vectors(ga_data);
      KMeansOptions km;
      km.threads = ga_threads;
      const AttributeTable attrs = ga_mode == "prob"
                                       ? prob_attrs(data.size(), ga_seed)
                                       : cluster_attrs(data, ga_c, ga_seed, ga_chunks, km);
      write_attrs(ga_out, attrs);
      return 0;
    }
    if (*synth) {
      write_fvecs(gs_out, gaussian_mixture(gs_n, gs_d, gs_centers, gs_scale, gs_seed));
      return 0;
    }
    if (*run) {
      if (!rf.config.empty()) apply_config(*run, read_config(rf.config));
      if (rf.data.empty() || rf.attrs.empty()) {
        throw ConfigError("run: --data and --attrs are required");
      }
      return cmd_run(rf);
    }
    if (*verify) {
      for (double a : vf_opts.alphas) AlphaOracleConfig{a, 0}.validate();
      return cmd_verify(vf_suite, vf_opts);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
