#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adkit/bench/report.hpp"
#include "adkit/bench/rng.hpp"
#include "adkit/bench/runner.hpp"

using namespace adkit;
using Catch::Approx;

TEST_CASE("input generation is deterministic per seed and case") {
  bench::Rng a(bench::derive_seed(42, "sum", 64));
  bench::Rng b(bench::derive_seed(42, "sum", 64));
  bench::Rng c(bench::derive_seed(43, "sum", 64));
  bool diverged = false;
  for (int i = 0; i < 32; ++i) {
    const double x = a.uniform(-1.0, 1.0);
    CHECK(x == b.uniform(-1.0, 1.0));
    diverged |= x != c.uniform(-1.0, 1.0);
  }
  CHECK(diverged);
}

TEST_CASE("every case validates at small sizes") {
  for (std::string_view name : bench::kCaseNames) {
    CAPTURE(name);
    for (std::size_t n : {std::size_t{2}, std::size_t{4}, std::size_t{64}}) {
      bench::PreparedCase pc = bench::prepare_case(name, n, 42);
      bench::Validation v = bench::validate_gradients(pc);
      INFO(v.detail);
      CHECK(v.ok);
    }
  }
}

TEST_CASE("iterative variants use the binary-chain form but the same math") {
  bench::PreparedCase iter = bench::prepare_case("sum_iter", 32, 11);
  const double v_iter = iter.run_static();
  std::vector<double> g;
  iter.save_gradient(g);
  CHECK(v_iter == Approx(iter.run_baseline()).epsilon(1e-14));
  REQUIRE(g.size() == 32);
  for (double gi : g) CHECK(gi == Approx(1.0));

  bench::PreparedCase piter = bench::prepare_case("prod_iter", 16, 11);
  const double v_prod = piter.run_static();
  std::vector<double> pg;
  piter.save_gradient(pg);
  CHECK(v_prod == Approx(piter.run_baseline()).epsilon(1e-14));
  const std::vector<double> want = piter.closed_form_grad();
  for (std::size_t i = 0; i < pg.size(); ++i)
    CHECK(pg[i] == Approx(want[i]).epsilon(1e-13));
}

TEST_CASE("unknown case names are rejected") {
  CHECK_THROWS_AS(bench::prepare_case("nope", 8, 1), ConfigError);
  CHECK(bench::case_index("nope") < 0);
  CHECK(bench::case_index("sum") == 0);
}

TEST_CASE("max_rel_err matches its definition and flags non-finite entries") {
  std::vector<double> g = {1.0, 2.0};
  std::vector<double> r = {1.0, 2.00002};
  CHECK(bench::max_rel_err(g, r) == Approx(0.00002 / 2.00002).epsilon(1e-6));

  std::vector<double> bad = {std::numeric_limits<double>::quiet_NaN(), 2.0};
  CHECK(std::isinf(bench::max_rel_err(bad, r)));
  std::vector<double> short_ref = {1.0};
  CHECK(std::isinf(bench::max_rel_err(g, short_ref)));
}

TEST_CASE("report writer: ordering, static ratio, empty input") {
  std::vector<bench::ReportRow> rows;
  // shuffled input on purpose; writer orders by (case, size, engine)
  rows.push_back({"sum", "baseline", 4, 3, 10.0, 0.5, 0.0});
  rows.push_back({"prod", "static", 2, 3, 20.0, 1.0, 1e-16});
  rows.push_back({"sum", "static", 4, 3, 20.0, 1.0, 0.0});
  rows.push_back({"sum", "tape", 2, 3, 40.0, 2.0, 0.0});
  rows.push_back({"sum", "static", 2, 3, 20.0, 1.0, 0.0});

  const std::string path = "test_report.csv";
  bench::emit_report(rows, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "bench,engine,n,iterations,mean_ns,rel_to_static,grad_max_rel_err");
  std::vector<std::string> first_cols;
  while (std::getline(in, line)) {
    first_cols.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  }
  const std::vector<std::string> want = {"sum,static", "sum,tape", "sum,static",
                                         "sum,baseline", "prod,static"};
  CHECK(first_cols == want);
  std::remove(path.c_str());

  CHECK_THROWS_AS(bench::emit_report({}, path), ConfigError);
  std::ifstream gone(path);
  CHECK(!gone.good());

  CHECK_THROWS_AS(bench::emit_report(rows, "/nonexistent-dir/x/report.csv"), IoError);
}

TEST_CASE("run_benchmark produces three engine rows per size") {
  std::vector<std::size_t> sizes = {4, 8};
  bench::RunOptions opt;
  opt.iters = 3;
  opt.warmup = 1;
  opt.seed = 42;
  std::vector<bench::ReportRow> rows;
  std::vector<std::string> diags;
  const bool ok = bench::run_benchmark("log_sum_exp", sizes, opt, rows, diags);
  CHECK(ok);
  CHECK(diags.empty());
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].engine == "static");
  CHECK(rows[0].rel_to_static == 1.0);
  CHECK(rows[1].engine == "tape");
  CHECK(rows[2].engine == "baseline");
  CHECK(rows[0].iterations == 3);
}

TEST_CASE("iters=1 with no warmup times exactly one evaluation") {
  std::vector<std::size_t> sizes = {4};
  bench::RunOptions opt;
  opt.iters = 1;
  opt.warmup = 0;
  opt.seed = 42;
  std::vector<bench::ReportRow> rows;
  std::vector<std::string> diags;
  CHECK(bench::run_benchmark("sum", sizes, opt, rows, diags));
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.iterations == 1);
}
