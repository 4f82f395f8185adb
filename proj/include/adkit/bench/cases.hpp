#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adkit/adkit.hpp"
#include "adkit/bench/rng.hpp"
#include "adkit/models/regression.hpp"
#include "adkit/models/stochastic_volatility.hpp"
#include "adkit/tape/tape.hpp"

namespace adkit::bench {

inline constexpr std::array<std::string_view, 9> kCaseNames = {
    "sum",        "sum_iter",   "prod",
    "prod_iter",  "log_sum_exp", "matmul",
    "normal_lpdf", "regression", "stochastic_volatility"};

inline int case_index(std::string_view name) {
  for (std::size_t i = 0; i < kCaseNames.size(); ++i)
    if (kCaseNames[i] == name) return static_cast<int>(i);
  return -1;
}

/// One benchmark instance: a size-n problem wired up for all three engines.
/// run_static performs a full reverse-mode evaluation on the bound
/// expression (adjoint reset + forward + backward); save_gradient copies the
/// resulting gradient without allocating after the first call. run_tape
/// re-records the program from scratch each call, the honest cost of a
/// dynamic tape. run_baseline is the handwritten forward-only evaluation.
struct PreparedCase {
  std::string bench;
  std::size_t n{};
  std::size_t grad_size{};
  std::function<double()> run_static;
  std::function<void(std::vector<double>&)> save_gradient;
  std::function<bool()> storage_exact;  // arena consumption == bind_size
  std::function<tape::TapeResult()> run_tape;
  std::function<double()> run_baseline;
  std::function<std::vector<double>()> closed_form_grad;  // unset for the models
};

namespace detail {

template <class E>
auto shared_bound(E e) {
  return std::make_shared<BoundExpr<E>>(std::move(e));
}

template <class Bound>
std::function<bool()> exact_storage_check(Bound bound) {
  return [bound] {
    const BindSize need = bound->expr().bind_size();
    return bound->arena().value_offset() == need.values &&
           bound->arena().adjoint_offset() == need.adjoints;
  };
}

inline std::size_t isqrt(std::size_t n) {
  std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while ((k + 1) * (k + 1) <= n) ++k;
  while (k > 1 && k * k > n) --k;
  return std::max<std::size_t>(k, 1);
}

inline std::vector<double> fill_uniform(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.uniform(lo, hi);
  return out;
}

}  // namespace detail

// --- sum / sum_iter ---------------------------------------------------------

inline PreparedCase prepare_sum(std::size_t n, std::uint64_t seed, bool iterative) {
  PreparedCase pc;
  pc.bench = iterative ? "sum_iter" : "sum";
  pc.n = n;
  pc.grad_size = n;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto data = std::make_shared<std::vector<double>>(detail::fill_uniform(rng, n, -2.0, 2.0));
  auto v = std::make_shared<Var<vec>>(n);
  v->set(*data);

  if (!iterative) {
    auto bound = detail::shared_bound(sum(ref(*v)));
    pc.storage_exact = detail::exact_storage_check(bound);
    pc.run_static = [v, bound] {
      v->reset_adjoints();
      return autodiff(bound->expr());
    };
  } else {
    // Explicit chain of binary additions through a running total, one slot
    // per step so every stored intermediate survives for the reverse sweep.
    auto acc = std::make_shared<Var<vec>>(n + 1);
    using Step = decltype(assign_elem(*acc, 1, elem(*acc, 0) + elem(*v, 0)));
    std::vector<Step> steps;
    steps.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      steps.push_back(assign_elem(*acc, i + 1, elem(*acc, i) + elem(*v, i)));
    auto bound = detail::shared_bound(seq(loop(std::move(steps)), elem(*acc, n)));
    pc.storage_exact = detail::exact_storage_check(bound);
    pc.run_static = [v, acc, bound] {
      v->reset_adjoints();
      acc->reset_adjoints();
      return autodiff(bound->expr());
    };
  }
  pc.save_gradient = [v](std::vector<double>& out) {
    out.assign(v->adjoints().begin(), v->adjoints().end());
  };
  pc.run_tape = [data, iterative] {
    return tape::tape_grad(
        [iterative](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          if (!iterative) return t.sum(in);
          tape::TapeVar acc = t.constant(0.0);
          for (tape::TapeVar x : in) acc = acc + x;
          return acc;
        },
        *data);
  };
  pc.run_baseline = [data] {
    double acc = 0.0;
    for (double x : *data) acc += x;
    return acc;
  };
  pc.closed_form_grad = [n] { return std::vector<double>(n, 1.0); };
  return pc;
}

// --- prod / prod_iter -------------------------------------------------------

inline std::vector<double> leave_one_out_products(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0), grad(n);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * xs[i];
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] * xs[i];
  for (std::size_t i = 0; i < n; ++i) grad[i] = prefix[i] * suffix[i + 1];
  return grad;
}

inline PreparedCase prepare_prod(std::size_t n, std::uint64_t seed, bool iterative) {
  PreparedCase pc;
  pc.bench = iterative ? "prod_iter" : "prod";
  pc.n = n;
  pc.grad_size = n;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto data = std::make_shared<std::vector<double>>(n);
  for (double& x : *data) x = rng.log_uniform(0.05);
  auto v = std::make_shared<Var<vec>>(n);
  v->set(*data);

  if (!iterative) {
    auto bound = detail::shared_bound(prod(ref(*v)));
    pc.storage_exact = detail::exact_storage_check(bound);
    pc.run_static = [v, bound] {
      v->reset_adjoints();
      return autodiff(bound->expr());
    };
  } else {
    auto acc = std::make_shared<Var<vec>>(n + 1);
    acc->values()[0] = 1.0;
    using Step = decltype(assign_elem(*acc, 1, elem(*acc, 0) * elem(*v, 0)));
    std::vector<Step> steps;
    steps.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      steps.push_back(assign_elem(*acc, i + 1, elem(*acc, i) * elem(*v, i)));
    auto bound = detail::shared_bound(seq(loop(std::move(steps)), elem(*acc, n)));
    pc.storage_exact = detail::exact_storage_check(bound);
    pc.run_static = [v, acc, bound] {
      v->reset_adjoints();
      acc->reset_adjoints();
      return autodiff(bound->expr());
    };
  }
  pc.save_gradient = [v](std::vector<double>& out) {
    out.assign(v->adjoints().begin(), v->adjoints().end());
  };
  // the naive tape comparator is the same multiplication chain either way
  pc.run_tape = [data] {
    return tape::tape_grad(
        [](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar acc = t.constant(1.0);
          for (tape::TapeVar x : in) acc = acc * x;
          return acc;
        },
        *data);
  };
  pc.run_baseline = [data] {
    double acc = 1.0;
    for (double x : *data) acc *= x;
    return acc;
  };
  pc.closed_form_grad = [data] { return leave_one_out_products(*data); };
  return pc;
}

// --- log_sum_exp ------------------------------------------------------------

inline PreparedCase prepare_log_sum_exp(std::size_t n, std::uint64_t seed) {
  PreparedCase pc;
  pc.bench = "log_sum_exp";
  pc.n = n;
  pc.grad_size = n;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto data = std::make_shared<std::vector<double>>(detail::fill_uniform(rng, n, -2.0, 2.0));
  auto v = std::make_shared<Var<vec>>(n);
  v->set(*data);

  auto bound = detail::shared_bound(log(sum(exp(ref(*v)))));
  pc.storage_exact = detail::exact_storage_check(bound);
  pc.run_static = [v, bound] {
    v->reset_adjoints();
    return autodiff(bound->expr());
  };
  pc.save_gradient = [v](std::vector<double>& out) {
    out.assign(v->adjoints().begin(), v->adjoints().end());
  };
  pc.run_tape = [data] {
    return tape::tape_grad(
        [](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          std::vector<tape::TapeVar> exps;
          exps.reserve(in.size());
          for (tape::TapeVar x : in) exps.push_back(exp(x));
          return log(t.sum(exps));
        },
        *data);
  };
  pc.run_baseline = [data] {
    double acc = 0.0;
    for (double x : *data) acc += std::exp(x);
    return std::log(acc);
  };
  pc.closed_form_grad = [data] {
    std::vector<double> g(data->size());
    double total = 0.0;
    for (double x : *data) total += std::exp(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp((*data)[i]) / total;
    return g;
  };
  return pc;
}

// --- matmul -----------------------------------------------------------------

inline PreparedCase prepare_matmul(std::size_t n, std::uint64_t seed) {
  PreparedCase pc;
  pc.bench = "matmul";
  pc.n = n;
  const std::size_t k = detail::isqrt(n);
  pc.grad_size = 2 * k * k;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto a_data = std::make_shared<std::vector<double>>(detail::fill_uniform(rng, k * k, -1.0, 1.0));
  auto b_data = std::make_shared<std::vector<double>>(detail::fill_uniform(rng, k * k, -1.0, 1.0));
  auto a = std::make_shared<Var<mat>>(k, k);
  auto b = std::make_shared<Var<mat>>(k, k);
  a->set(*a_data);
  b->set(*b_data);

  auto bound = detail::shared_bound(sum(matmul(ref(*a), ref(*b))));
  pc.storage_exact = detail::exact_storage_check(bound);
  pc.run_static = [a, b, bound] {
    a->reset_adjoints();
    b->reset_adjoints();
    return autodiff(bound->expr());
  };
  pc.save_gradient = [a, b](std::vector<double>& out) {
    out.resize(a->size() + b->size());
    std::copy(a->adjoints().begin(), a->adjoints().end(), out.begin());
    std::copy(b->adjoints().begin(), b->adjoints().end(), out.begin() + a->size());
  };
  pc.run_tape = [a_data, b_data, k] {
    std::vector<double> inputs(*a_data);
    inputs.insert(inputs.end(), b_data->begin(), b_data->end());
    return tape::tape_grad(
        [k](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          std::span<const tape::TapeVar> av(in.data(), k * k);
          std::span<const tape::TapeVar> bv(in.data() + k * k, k * k);
          std::vector<tape::TapeVar> row(k), col(k), cells;
          cells.reserve(k * k);
          for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < k; ++i) {
              for (std::size_t tt = 0; tt < k; ++tt) {
                row[tt] = av[i + tt * k];
                col[tt] = bv[tt + j * k];
              }
              cells.push_back(t.dot(row, col));
            }
          return t.sum(cells);
        },
        inputs);
  };
  pc.run_baseline = [a_data, b_data, k] {
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < k; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < k; ++t)
          acc += (*a_data)[i + t * k] * (*b_data)[t + j * k];
        total += acc;
      }
    return total;
  };
  pc.closed_form_grad = [a_data, b_data, k] {
    // d/dA(i,j) = sum_t B(j,t); d/dB(i,j) = sum_t A(t,i)
    std::vector<double> g(2 * k * k);
    for (std::size_t j = 0; j < k; ++j) {
      double row_sum = 0.0;
      for (std::size_t t = 0; t < k; ++t) row_sum += (*b_data)[j + t * k];
      for (std::size_t i = 0; i < k; ++i) g[i + j * k] = row_sum;
    }
    for (std::size_t i = 0; i < k; ++i) {
      double col_sum = 0.0;
      for (std::size_t t = 0; t < k; ++t) col_sum += (*a_data)[t + i * k];
      for (std::size_t j = 0; j < k; ++j) g[k * k + i + j * k] = col_sum;
    }
    return g;
  };
  return pc;
}

// --- normal_lpdf ------------------------------------------------------------

inline PreparedCase prepare_normal_lpdf(std::size_t n, std::uint64_t seed) {
  PreparedCase pc;
  pc.bench = "normal_lpdf";
  pc.n = n;
  pc.grad_size = n;

  constexpr double kMu = -0.56;
  constexpr double kSigma = 1.37;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto data = std::make_shared<std::vector<double>>(
      detail::fill_uniform(rng, n, kMu - 2.0 * kSigma, kMu + 2.0 * kSigma));
  auto x = std::make_shared<Var<vec>>(n);
  x->set(*data);

  auto bound = detail::shared_bound(normal_lpdf(ref(*x), kMu, kSigma));
  pc.storage_exact = detail::exact_storage_check(bound);
  pc.run_static = [x, bound] {
    x->reset_adjoints();
    return autodiff(bound->expr());
  };
  pc.save_gradient = [x](std::vector<double>& out) {
    out.assign(x->adjoints().begin(), x->adjoints().end());
  };
  pc.run_tape = [data, n] {
    return tape::tape_grad(
        [n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar acc = t.constant(0.0);
          for (tape::TapeVar x : in) {
            tape::TapeVar d = x - kMu;
            acc = acc + d * d;
          }
          return acc * (-0.5 / (kSigma * kSigma)) +
                 t.constant(-static_cast<double>(n) * std::log(kSigma));
        },
        *data);
  };
  pc.run_baseline = [data, n] {
    double sumsq = 0.0;
    for (double x : *data) sumsq += (x - kMu) * (x - kMu);
    return -0.5 * sumsq / (kSigma * kSigma) -
           static_cast<double>(n) * std::log(kSigma);
  };
  pc.closed_form_grad = [data] {
    std::vector<double> g(data->size());
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = -((*data)[i] - kMu) / (kSigma * kSigma);
    return g;
  };
  return pc;
}

// --- regression -------------------------------------------------------------

inline constexpr std::size_t kRegressionPredictors = 3;

inline PreparedCase prepare_regression(std::size_t n, std::uint64_t seed) {
  PreparedCase pc;
  pc.bench = "regression";
  pc.n = n;
  const std::size_t p = kRegressionPredictors;
  pc.grad_size = p + 2;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto prob = std::make_shared<models::RegressionProblem>(n, p);
  prob->x_data = detail::fill_uniform(rng, n * p, -1.0, 1.0);
  prob->y_data = detail::fill_uniform(rng, n, -1.0, 1.0);
  auto w0 = detail::fill_uniform(rng, p, -0.5, 0.5);
  prob->w.set(w0);
  prob->b.set(rng.uniform(-0.5, 0.5));
  prob->sigma.set(rng.uniform(0.5, 2.0));

  auto bound = detail::shared_bound(models::build_regression(*prob));
  pc.storage_exact = detail::exact_storage_check(bound);
  pc.run_static = [prob, bound] {
    reset_adjoints(prob->w, prob->b, prob->sigma);
    return autodiff(bound->expr());
  };
  pc.save_gradient = [prob, p](std::vector<double>& out) {
    out.resize(p + 2);
    std::copy(prob->w.adjoints().begin(), prob->w.adjoints().end(), out.begin());
    out[p] = prob->b.adjoint();
    out[p + 1] = prob->sigma.adjoint();
  };
  pc.run_tape = [prob, n, p] {
    std::vector<double> inputs(prob->w.values().begin(), prob->w.values().end());
    inputs.push_back(prob->b.value());
    inputs.push_back(prob->sigma.value());
    return tape::tape_grad(
        [prob, n, p](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          std::span<const tape::TapeVar> w(in.data(), p);
          tape::TapeVar b = in[p];
          tape::TapeVar sig = in[p + 1];
          tape::TapeVar sumsq = t.constant(0.0);
          for (std::size_t r = 0; r < n; ++r) {
            tape::TapeVar mu = b;
            for (std::size_t j = 0; j < p; ++j)
              mu = mu + t.constant(prob->x_data[r + j * n]) * w[j];
            tape::TapeVar d = t.constant(prob->y_data[r]) - mu;
            sumsq = sumsq + d * d;
          }
          tape::TapeVar ll =
              sumsq * (-0.5) / (sig * sig) - static_cast<double>(n) * log(sig);
          tape::TapeVar wprior = t.constant(0.0);
          for (std::size_t j = 0; j < p; ++j) wprior = wprior + w[j] * w[j];
          ll = ll + wprior * (-0.5) + b * b * (-0.5);
          const double sv = t.value(sig);
          const double uprior = (sv >= 0.1 && sv <= 10.0)
                                    ? -std::log(9.9)
                                    : -std::numeric_limits<double>::infinity();
          return ll + t.constant(uprior);
        },
        inputs);
  };
  pc.run_baseline = [prob, n, p] {
    double sumsq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double mu = prob->b.value();
      for (std::size_t j = 0; j < p; ++j)
        mu += prob->x_data[r + j * n] * prob->w.values()[j];
      const double d = prob->y_data[r] - mu;
      sumsq += d * d;
    }
    const double sig = prob->sigma.value();
    double ll = -0.5 * sumsq / (sig * sig) - static_cast<double>(n) * std::log(sig);
    for (std::size_t j = 0; j < p; ++j)
      ll -= 0.5 * prob->w.values()[j] * prob->w.values()[j];
    ll -= 0.5 * prob->b.value() * prob->b.value();
    ll += (sig >= 0.1 && sig <= 10.0) ? -std::log(9.9)
                                      : -std::numeric_limits<double>::infinity();
    return ll;
  };
  return pc;
}

// --- stochastic volatility ----------------------------------------------------

inline PreparedCase prepare_stochastic_volatility(std::size_t n, std::uint64_t seed) {
  PreparedCase pc;
  pc.bench = "stochastic_volatility";
  pc.n = n;
  pc.grad_size = 2 * n + 3;

  Rng rng(derive_seed(seed, pc.bench, n));
  auto prob = std::make_shared<models::SvProblem>(n);
  prob->y_data = detail::fill_uniform(rng, n, -1.0, 1.0);
  auto hs0 = detail::fill_uniform(rng, n, -1.0, 1.0);
  prob->h_std.set(hs0);
  prob->phi.set(rng.uniform(-0.9, 0.9));
  prob->sigma.set(rng.uniform(0.5, 2.0));
  prob->mu.set(rng.uniform(-1.0, 1.0));

  auto bound = detail::shared_bound(models::build_sv(*prob));
  pc.storage_exact = detail::exact_storage_check(bound);
  pc.run_static = [prob, bound] {
    reset_adjoints(prob->h_std, prob->h, prob->phi, prob->sigma, prob->mu);
    return autodiff(bound->expr());
  };
  pc.save_gradient = [prob, n](std::vector<double>& out) {
    out.resize(2 * n + 3);
    std::copy(prob->h_std.adjoints().begin(), prob->h_std.adjoints().end(), out.begin());
    std::copy(prob->h.adjoints().begin(), prob->h.adjoints().end(), out.begin() + n);
    out[2 * n] = prob->phi.adjoint();
    out[2 * n + 1] = prob->sigma.adjoint();
    out[2 * n + 2] = prob->mu.adjoint();
  };
  pc.run_tape = [prob, n] {
    std::vector<double> inputs(prob->h_std.values().begin(), prob->h_std.values().end());
    inputs.insert(inputs.end(), prob->h.values().begin(), prob->h.values().end());
    inputs.push_back(prob->phi.value());
    inputs.push_back(prob->sigma.value());
    inputs.push_back(prob->mu.value());
    return tape::tape_grad(
        [prob, n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar phi = in[2 * n];
          tape::TapeVar sig = in[2 * n + 1];
          tape::TapeVar mu = in[2 * n + 2];
          std::vector<tape::TapeVar> h(n);
          for (std::size_t i = 0; i < n; ++i) h[i] = in[i] * sig;
          h[0] = h[0] / sqrt(1.0 - phi * phi);
          for (std::size_t i = 0; i < n; ++i) h[i] = h[i] + mu;
          for (std::size_t i = 1; i < n; ++i) h[i] = phi * (h[i - 1] - mu);

          tape::TapeVar ll = t.constant(0.0);
          for (std::size_t i = 0; i < n; ++i) {
            tape::TapeVar scale = exp(h[i]);
            tape::TapeVar u = t.constant(prob->y_data[i]) / scale;
            ll = ll + u * u * (-0.5) - log(scale);
          }
          for (std::size_t i = 0; i < n; ++i) ll = ll + in[i] * in[i] * (-0.5);
          tape::TapeVar us = sig / 5.0;
          ll = ll - log(t.constant(5.0)) - log(1.0 + us * us);
          tape::TapeVar um = mu / 10.0;
          ll = ll - log(t.constant(10.0)) - log(1.0 + um * um);
          const double pv = t.value(phi);
          const double uprior = (pv >= -1.0 && pv <= 1.0)
                                    ? -std::log(2.0)
                                    : -std::numeric_limits<double>::infinity();
          return ll + t.constant(uprior);
        },
        inputs);
  };
  pc.run_baseline = [prob, n] {
    const double phi = prob->phi.value();
    const double sig = prob->sigma.value();
    const double mu = prob->mu.value();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = prob->h_std.values()[i] * sig;
    h[0] = h[0] / std::sqrt(1.0 - phi * phi);
    for (std::size_t i = 0; i < n; ++i) h[i] = h[i] + mu;
    for (std::size_t i = 1; i < n; ++i) h[i] = phi * (h[i - 1] - mu);

    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::exp(h[i]);
      const double u = prob->y_data[i] / scale;
      ll += -0.5 * u * u - std::log(scale);
    }
    for (std::size_t i = 0; i < n; ++i)
      ll += -0.5 * prob->h_std.values()[i] * prob->h_std.values()[i];
    const double us = sig / 5.0;
    ll += -std::log(5.0) - std::log(1.0 + us * us);
    const double um = mu / 10.0;
    ll += -std::log(10.0) - std::log(1.0 + um * um);
    ll += (phi >= -1.0 && phi <= 1.0) ? -std::log(2.0)
                                      : -std::numeric_limits<double>::infinity();
    return ll;
  };
  return pc;
}

/// Builds the named case at size n with seeded inputs. For matmul, n is the
/// total element budget and the operands are K x K with K = floor(sqrt(n)).
inline PreparedCase prepare_case(std::string_view name, std::size_t n,
                                 std::uint64_t seed) {
  if (name == "sum") return prepare_sum(n, seed, false);
  if (name == "sum_iter") return prepare_sum(n, seed, true);
  if (name == "prod") return prepare_prod(n, seed, false);
  if (name == "prod_iter") return prepare_prod(n, seed, true);
  if (name == "log_sum_exp") return prepare_log_sum_exp(n, seed);
  if (name == "matmul") return prepare_matmul(n, seed);
  if (name == "normal_lpdf") return prepare_normal_lpdf(n, seed);
  if (name == "regression") return prepare_regression(n, seed);
  if (name == "stochastic_volatility") return prepare_stochastic_volatility(n, seed);
  throw ConfigError("unknown benchmark case: " + std::string(name));
}

}  // namespace adkit::bench
