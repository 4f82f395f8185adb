// adbench: times the statically composed AD engine against the dynamic tape
// and a handwritten forward-only baseline across the benchmark set, validates
// every gradient first, and writes a CSV report.
//
//   adbench run --bench all --min-exp 1 --max-exp 10 --iters 0 --warmup 10
//               --seed 42 --out report.csv
//
// Sizes are powers of two from 2^min-exp to 2^max-exp; matmul reads a size as
// a total element budget for its K x K operands. Exit code 0 means every
// gradient validation passed.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adkit/bench/report.hpp"
#include "adkit/bench/runner.hpp"

namespace {

struct CliConfig {
  std::string bench = "all";
  std::size_t min_exp = 1;
  std::size_t max_exp = 10;
  std::uint64_t iters = 0;
  std::uint64_t warmup = 10;
  std::uint64_t seed = 1;
  std::string out = "adbench.csv";
};

int run_command(const CliConfig& cfg) {
  using namespace adkit::bench;

  if (cfg.min_exp < 1 || cfg.max_exp < cfg.min_exp || cfg.max_exp > 24) {
    std::fprintf(stderr, "adbench: need 1 <= min-exp <= max-exp <= 24\n");
    return 2;
  }

  std::vector<std::string_view> names;
  if (cfg.bench == "all") {
    names.assign(kCaseNames.begin(), kCaseNames.end());
  } else {
    if (case_index(cfg.bench) < 0) {
      std::fprintf(stderr, "adbench: unknown benchmark case '%s'\n", cfg.bench.c_str());
      return 2;
    }
    names.push_back(cfg.bench);
  }

  std::vector<std::size_t> sizes;
  for (std::size_t k = cfg.min_exp; k <= cfg.max_exp; ++k)
    sizes.push_back(std::size_t{1} << k);

  RunOptions opt;
  opt.iters = cfg.iters;
  opt.warmup = cfg.warmup;
  opt.seed = cfg.seed;

  std::vector<ReportRow> rows;
  std::vector<std::string> diagnostics;
  bool all_ok = true;
  for (std::string_view name : names) {
    std::printf("running %s (n = 2^%zu .. 2^%zu)\n", std::string(name).c_str(),
                cfg.min_exp, cfg.max_exp);
    std::fflush(stdout);
    all_ok &= run_benchmark(name, sizes, opt, rows, diagnostics);
  }

  for (const std::string& d : diagnostics)
    std::fprintf(stderr, "adbench: validation failed: %s\n", d.c_str());

  if (!rows.empty()) {
    emit_report(rows, cfg.out);
    std::printf("wrote %zu rows to %s\n", rows.size(), cfg.out.c_str());
  } else {
    std::fprintf(stderr, "adbench: no rows to report\n");
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reverse-mode AD benchmark harness"};
  app.require_subcommand(1);

  CliConfig cfg;
  CLI::App* run = app.add_subcommand("run", "time engines and emit a CSV report");
  run->add_option("--bench", cfg.bench, "case name or 'all'")->capture_default_str();
  run->add_option("--min-exp", cfg.min_exp, "smallest size exponent")->capture_default_str();
  run->add_option("--max-exp", cfg.max_exp, "largest size exponent")->capture_default_str();
  run->add_option("--iters", cfg.iters, "timed iterations per engine (0 = auto)")
      ->capture_default_str();
  run->add_option("--warmup", cfg.warmup, "warmup evaluations per engine")
      ->capture_default_str();
  run->add_option("--seed", cfg.seed, "input generator seed")->capture_default_str();
  run->add_option("--out", cfg.out, "CSV output path")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "adbench: %s\n", e.what());
    return 2;
  }
}
