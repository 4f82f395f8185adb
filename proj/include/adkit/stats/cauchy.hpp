#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

/// Cauchy log-density with scalar location and scale, summed over the
/// elements of x and dropping the -n log(pi) constant:
///
///   sum_i [ -log(gamma) - log(1 + ((x_i - loc) / gamma)^2) ]
///
/// A constant scale caches log(gamma) at construction.
template <Expr X, ScalarExpr Loc, ScalarExpr Gamma>
  requires(!std::same_as<shape_tag_t<X>, mat>)
class CauchyLpdfNode {
  static constexpr bool gamma_const = is_constant_expr_v<Gamma>;

 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  CauchyLpdfNode(X x, Loc loc, Gamma gamma)
      : x_(std::move(x)), loc_(std::move(loc)), gamma_(std::move(gamma)) {
    n_ = static_cast<double>(x_.shape().size());
    if constexpr (gamma_const) {
      check_scale(gamma_.values()[0]);
      log_gamma_ = std::log(gamma_.values()[0]);
    }
  }

  Shape shape() const { return Shape::scalar(); }
  BindSize self_size() const { return {1, 1}; }
  BindSize bind_size() const {
    return x_.bind_size() + loc_.bind_size() + gamma_.bind_size() + self_size();
  }

  void bind(Arena& arena) {
    x_.bind(arena);
    loc_.bind(arena);
    gamma_.bind(arena);
    view_.val = arena.take_values(1);
    view_.adj = arena.take_adjoints(1);
    view_.shape = Shape::scalar();
  }

  std::span<const double> forward() {
    std::span<const double> xs = x_.forward();
    const double loc = loc_.forward()[0];
    const double gamma = gamma_.forward()[0];
    if constexpr (!gamma_const) check_scale(gamma);

    const double log_gamma = gamma_const ? log_gamma_ : std::log(gamma);
    double acc = -n_ * log_gamma;
    for (double xi : xs) {
      const double u = (xi - loc) / gamma;
      acc -= std::log1p(u * u);
    }
    view_.val[0] = acc;
    return view_.val;
  }

  void backward() {
    const double s = view_.adj[0];
    std::span<const double> xs = x_.values();
    const double loc = loc_.values()[0];
    const double gamma = gamma_.values()[0];
    const double g2 = gamma * gamma;

    if constexpr (!gamma_const) {
      double acc = 0.0;
      for (double xi : xs) {
        const double d = xi - loc;
        acc += -1.0 / gamma + 2.0 * d * d / (gamma * (g2 + d * d));
      }
      gamma_.deposit([=](std::size_t) { return s * acc; });
      gamma_.backward();
    }

    if constexpr (!is_constant_expr_v<Loc>) {
      double acc = 0.0;
      for (double xi : xs) {
        const double d = xi - loc;
        acc += 2.0 * d / (g2 + d * d);
      }
      loc_.deposit([=](std::size_t) { return s * acc; });
      loc_.backward();
    }

    if constexpr (!is_constant_expr_v<X>) {
      x_.deposit([=](std::size_t i) {
        const double d = xs[i] - loc;
        return -s * 2.0 * d / (g2 + d * d);
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
  static void check_scale(double gamma) {
    if (gamma <= 0.0) throw DomainError("cauchy gamma must be positive");
  }

  X x_;
  Loc loc_;
  Gamma gamma_;
  double n_{1.0};
  double log_gamma_{0.0};  // populated once when gamma is constant
  ValueAdjView view_{};
};

template <class X, class Loc, class Gamma>
  requires(IntoExpr<X> && IntoExpr<Loc> && IntoExpr<Gamma> &&
           !std::same_as<shape_tag_t<lifted_t<X>>, mat> &&
           std::same_as<shape_tag_t<lifted_t<Loc>>, scl> &&
           std::same_as<shape_tag_t<lifted_t<Gamma>>, scl>)
auto cauchy_lpdf(X&& x, Loc&& loc, Gamma&& gamma) {
  return CauchyLpdfNode<lifted_t<X>, lifted_t<Loc>, lifted_t<Gamma>>(
      detail::lift(std::forward<X>(x)), detail::lift(std::forward<Loc>(loc)),
      detail::lift(std::forward<Gamma>(gamma)));
}

}  // namespace adkit
