#pragma once

#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adkit/bench/cases.hpp"
#include "adkit/bench/report.hpp"

namespace adkit::bench {

/// Max over components of |g - r| / max(1e-30, |r|); non-finite entries
/// report +inf.
inline double max_rel_err(std::span<const double> g, std::span<const double> r) {
  if (g.size() != r.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double err = std::fabs(g[i] - r[i]) / std::max(1e-30, std::fabs(r[i]));
    if (!std::isfinite(err)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
  }
  return worst;
}

/// Gradient tolerance for a validated case. Closed-form references are held
/// to 1e-13 up to 2^10 elements and 1e-11 beyond (summation-order slack on
/// long reductions); the model cases are checked against the tape oracle.
inline double gradient_tolerance(bool closed_form, std::size_t n) {
  if (closed_form) return n <= 1024 ? 1e-13 : 1e-11;
  return 1e-10;
}

struct RunOptions {
  std::uint64_t iters{0};  // 0: pick so each engine runs >= target_ns
  std::uint64_t warmup{10};
  std::uint64_t seed{1};
  double target_ns{1e8};
};

struct Validation {
  bool ok{false};
  double err_static{0};
  double err_tape{0};
  double err_baseline_value{0};
  std::string detail;
};

/// Runs each engine once and checks gradients (and the baseline's value)
/// against the case's reference before any timing happens.
inline Validation validate_gradients(PreparedCase& pc) {
  Validation v;
  const double static_value = pc.run_static();
  std::vector<double> static_grad;
  pc.save_gradient(static_grad);
  tape::TapeResult tr = pc.run_tape();
  const double baseline_value = pc.run_baseline();

  const bool closed = static_cast<bool>(pc.closed_form_grad);
  std::vector<double> reference = closed ? pc.closed_form_grad() : tr.gradient;

  v.err_static = max_rel_err(static_grad, reference);
  v.err_tape = closed ? max_rel_err(tr.gradient, reference) : 0.0;
  v.err_baseline_value = std::fabs(baseline_value - static_value) /
                         std::max(1e-30, std::fabs(static_value));
  const double value_gap = std::fabs(tr.value - static_value) /
                           std::max(1e-30, std::fabs(static_value));

  const double tol = gradient_tolerance(closed, pc.n);
  v.ok = v.err_static <= tol && v.err_tape <= tol && v.err_baseline_value <= 1e-12 &&
         value_gap <= 1e-10;
  if (!v.ok) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s n=%zu: grad err static=%.3e tape=%.3e (tol %.1e), "
                  "baseline value err=%.3e, value gap=%.3e",
                  pc.bench.c_str(), pc.n, v.err_static, v.err_tape, tol,
                  v.err_baseline_value, value_gap);
    v.detail = buf;
  }
  return v;
}

namespace detail {

struct Timed {
  double mean_ns;
  std::uint64_t iters;
};

// Keeps results observable so the optimizer cannot drop the timed work.
inline volatile double g_sink = 0.0;

template <class F>
Timed time_loop(F&& fn, const RunOptions& opt) {
  using clock = std::chrono::steady_clock;
  for (std::uint64_t i = 0; i < opt.warmup; ++i) fn();

  std::uint64_t iters = opt.iters;
  if (iters == 0) {
    std::uint64_t batch = 1;
    double elapsed_ns = 0.0;
    for (;;) {
      const auto t0 = clock::now();
      for (std::uint64_t i = 0; i < batch; ++i) fn();
      elapsed_ns = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
      if (elapsed_ns >= 5e6 || batch >= (1ULL << 22)) break;
      batch *= 8;
    }
    const double per = std::max(elapsed_ns / static_cast<double>(batch), 0.5);
    iters = static_cast<std::uint64_t>(opt.target_ns / per);
    iters = std::min<std::uint64_t>(std::max<std::uint64_t>(iters, 1), 50'000'000);
  }

  const auto t0 = clock::now();
  for (std::uint64_t i = 0; i < iters; ++i) fn();
  const double total_ns =
      std::chrono::duration<double, std::nano>(clock::now() - t0).count();
  return {total_ns / static_cast<double>(iters), iters};
}

}  // namespace detail

/// Times the three engines for one case across the given sizes. Rows for a
/// size are emitted only after its gradients validate; diagnostics for
/// failures land in `diagnostics` and flip the return flag.
inline bool run_benchmark(std::string_view name, std::span<const std::size_t> sizes,
                          const RunOptions& opt, std::vector<ReportRow>& rows,
                          std::vector<std::string>& diagnostics) {
  bool all_ok = true;
  for (std::size_t n : sizes) {
    PreparedCase pc = prepare_case(name, n, opt.seed);
    Validation val = validate_gradients(pc);
    if (!val.ok) {
      all_ok = false;
      diagnostics.push_back(val.detail);
      continue;
    }

    std::vector<double> grad_buf;
    grad_buf.reserve(pc.grad_size);
    detail::Timed st = detail::time_loop(
        [&] {
          detail::g_sink = pc.run_static();
          pc.save_gradient(grad_buf);
        },
        opt);
    detail::Timed tp = detail::time_loop(
        [&] {
          tape::TapeResult r = pc.run_tape();
          detail::g_sink = r.value + r.gradient[0];
        },
        opt);
    detail::Timed bl = detail::time_loop([&] { detail::g_sink = pc.run_baseline(); }, opt);

    rows.push_back({pc.bench, "static", n, st.iters, st.mean_ns, 1.0, val.err_static});
    rows.push_back(
        {pc.bench, "tape", n, tp.iters, tp.mean_ns, tp.mean_ns / st.mean_ns, val.err_tape});
    rows.push_back({pc.bench, "baseline", n, bl.iters, bl.mean_ns, bl.mean_ns / st.mean_ns,
                    val.err_baseline_value});
  }
  return all_ok;
}

}  // namespace adkit::bench
