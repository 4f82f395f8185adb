#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/instrument.hpp"
#include "adkit/var.hpp"

namespace adkit {

/// Normal log-density of x given mean mu and standard deviation sigma,
/// summed over elements and dropping the -n/2 log(2 pi) constant:
///
///   -(1/2) sum_i (x_i - mu_i)^2 / sigma_i^2  -  sum_i log sigma_i
///
/// mu and sigma are scalars or vectors matching x (a per-element scale covers
/// heteroscedastic likelihoods); a full covariance matrix is rejected at
/// compile time. Two construction-time specializations:
///
///  - constant x with scalar mu: the data collapses to its mean and biased
///    variance in one preprocessing sweep, after which every evaluation is
///    O(1) via  -(n / 2 sigma^2) ((xbar - mu)^2 + var)  - n log sigma.
///  - constant sigma: the log-scale term is computed once and reused.
///
/// Every per-element sweep over x bumps instrument::lpdf_data_passes so the
/// once-only behaviour is checkable.
namespace detail {

// data argument is scalar or vector; parameters are scalar or elementwise
// (full covariance matrices are out: they would need a different routine)
template <class X, class P>
concept LpdfParam = std::same_as<shape_tag_t<P>, scl> ||
                    (std::same_as<shape_tag_t<P>, shape_tag_t<X>> &&
                     !std::same_as<shape_tag_t<X>, mat>);

template <class X>
concept LpdfData = !std::same_as<shape_tag_t<X>, mat>;

}  // namespace detail

template <Expr X, Expr M, Expr S>
  requires(detail::LpdfData<X> && detail::LpdfParam<X, M> && detail::LpdfParam<X, S>)
class NormalLpdfNode {
  static constexpr bool mu_scl = std::same_as<shape_tag_t<M>, scl>;
  static constexpr bool sig_scl = std::same_as<shape_tag_t<S>, scl>;
  static constexpr bool x_const = is_constant_expr_v<X>;
  static constexpr bool mu_const = is_constant_expr_v<M>;
  static constexpr bool sig_const = is_constant_expr_v<S>;
  static constexpr bool fast = x_const && mu_scl && sig_scl;

 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  NormalLpdfNode(X x, M mu, S sigma)
      : x_(std::move(x)), mu_(std::move(mu)), sigma_(std::move(sigma)) {
    if constexpr (!mu_scl)
      if (mu_.shape() != x_.shape()) throw ShapeError("mu extent must match x");
    if constexpr (!sig_scl)
      if (sigma_.shape() != x_.shape()) throw ShapeError("sigma extent must match x");
    n_ = static_cast<double>(x_.shape().size());

    if constexpr (x_const) {
      std::span<const double> xs = x_.values();
      instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
      double mean = 0.0;
      for (double xi : xs) mean += xi;
      mean /= n_;
      double var = 0.0;
      for (double xi : xs) var += (xi - mean) * (xi - mean);
      var /= n_;
      x_mean_ = mean;
      x_var_ = var;
    }
    if constexpr (sig_const) {
      std::span<const double> ss = sigma_.values();
      double acc = 0.0;
      for (double si : ss) {
        check_scale(si);
        acc += std::log(si);
      }
      log_scale_sum_ = sig_scl ? n_ * acc : acc;
    }
  }

  Shape shape() const { return Shape::scalar(); }
  BindSize self_size() const { return {1, 1}; }
  BindSize bind_size() const {
    return x_.bind_size() + mu_.bind_size() + sigma_.bind_size() + self_size();
  }

  void bind(Arena& arena) {
    x_.bind(arena);
    mu_.bind(arena);
    sigma_.bind(arena);
    view_.val = arena.take_values(1);
    view_.adj = arena.take_adjoints(1);
    view_.shape = Shape::scalar();
  }

  std::span<const double> forward() {
    std::span<const double> xs = x_.forward();
    std::span<const double> ms = mu_.forward();
    std::span<const double> ss = sigma_.forward();
    if constexpr (!sig_const)
      for (double si : ss) check_scale(si);

    double value;
    if constexpr (fast) {
      const double sig = ss[0];
      const double centered = x_mean_ - ms[0];
      const double quad = n_ * (x_var_ + centered * centered);
      value = -0.5 * quad / (sig * sig) - log_scale(ss);
    } else {
      instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
      const std::size_t n = xs.size();
      if constexpr (sig_scl) {
        double sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = xs[i] - ms[mu_scl ? 0 : i];
          sumsq += d * d;
        }
        value = -0.5 * sumsq / (ss[0] * ss[0]) - log_scale(ss);
      } else {
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = xs[i] - ms[mu_scl ? 0 : i];
          quad += d * d / (ss[i] * ss[i]);
        }
        value = -0.5 * quad - log_scale(ss);
      }
    }
    view_.val[0] = value;
    return view_.val;
  }

  void backward() {
    const double s = view_.adj[0];
    std::span<const double> xs = x_.values();
    std::span<const double> ms = mu_.values();
    std::span<const double> ss = sigma_.values();
    const std::size_t n = xs.size();

    if constexpr (!sig_const) {
      if constexpr (fast) {
        const double sig = ss[0];
        const double centered = x_mean_ - ms[0];
        const double quad = n_ * (x_var_ + centered * centered);
        const double d_sig = quad / (sig * sig * sig) - n_ / sig;
        sigma_.deposit([=](std::size_t) { return s * d_sig; });
      } else if constexpr (sig_scl) {
        instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
        const double sig = ss[0];
        double sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = xs[i] - ms[mu_scl ? 0 : i];
          sumsq += d * d;
        }
        const double d_sig = sumsq / (sig * sig * sig) - n_ / sig;
        sigma_.deposit([=](std::size_t) { return s * d_sig; });
      } else {
        instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
        sigma_.deposit([=](std::size_t i) {
          const double d = xs[i] - ms[mu_scl ? 0 : i];
          const double sig = ss[i];
          return s * (d * d / (sig * sig * sig) - 1.0 / sig);
        });
      }
      sigma_.backward();
    }

    if constexpr (!mu_const) {
      if constexpr (fast) {
        const double sig = ss[0];
        const double d_mu = n_ * (x_mean_ - ms[0]) / (sig * sig);
        mu_.deposit([=](std::size_t) { return s * d_mu; });
      } else if constexpr (mu_scl) {
        instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double sig = ss[sig_scl ? 0 : i];
          acc += (xs[i] - ms[0]) / (sig * sig);
        }
        mu_.deposit([=](std::size_t) { return s * acc; });
      } else {
        instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
        mu_.deposit([=](std::size_t i) {
          const double sig = ss[sig_scl ? 0 : i];
          return s * (xs[i] - ms[i]) / (sig * sig);
        });
      }
      mu_.backward();
    }

    if constexpr (!x_const) {
      instrument::lpdf_data_passes().fetch_add(1, std::memory_order_relaxed);
      x_.deposit([=](std::size_t i) {
        const double sig = ss[sig_scl ? 0 : i];
        return -s * (xs[i] - ms[mu_scl ? 0 : i]) / (sig * sig);
      });
      x_.backward();
    }
  }

  template <class F>
  void deposit(F&& seed) {
    view_.adj[0] = seed(0);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  static void check_scale(double sig) {
    if (sig <= 0.0) throw DomainError("normal sigma must be positive");
  }

  double log_scale(std::span<const double> ss) const {
    if constexpr (sig_const) return log_scale_sum_;
    if constexpr (sig_scl) return n_ * std::log(ss[0]);
    double acc = 0.0;
    for (double si : ss) acc += std::log(si);
    return acc;
  }

  X x_;
  M mu_;
  S sigma_;
  double n_{1.0};
  double x_mean_{0.0};  // populated once when x is constant
  double x_var_{0.0};
  double log_scale_sum_{0.0};  // populated once when sigma is constant
  ValueAdjView view_{};
};

template <class X, class M, class S>
  requires(IntoExpr<X> && IntoExpr<M> && IntoExpr<S> &&
           detail::LpdfData<lifted_t<X>> &&
           detail::LpdfParam<lifted_t<X>, lifted_t<M>> &&
           detail::LpdfParam<lifted_t<X>, lifted_t<S>>)
auto normal_lpdf(X&& x, M&& mu, S&& sigma) {
  return NormalLpdfNode<lifted_t<X>, lifted_t<M>, lifted_t<S>>(
      detail::lift(std::forward<X>(x)), detail::lift(std::forward<M>(mu)),
      detail::lift(std::forward<S>(sigma)));
}

}  // namespace adkit
