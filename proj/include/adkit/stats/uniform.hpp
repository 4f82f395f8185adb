#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

/// Uniform log-density on [lo, hi] with fixed bounds, summed over elements:
/// -n log(hi - lo) inside the support, -inf as soon as any element leaves
/// it. The density does not depend on x inside the support, so the reverse
/// sweep writes nothing either way; samplers probing out-of-support points
/// get the -inf value instead of an error.
template <Expr X>
  requires(!std::same_as<shape_tag_t<X>, mat>)
class UniformLpdfNode {
 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  UniformLpdfNode(X x, double lo, double hi) : x_(std::move(x)), lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw ConfigError("uniform bounds need lo < hi");
    log_width_ = std::log(hi - lo);
    n_ = static_cast<double>(x_.shape().size());
  }

  Shape shape() const { return Shape::scalar(); }
  BindSize self_size() const { return {1, 1}; }
  BindSize bind_size() const { return x_.bind_size() + self_size(); }

  void bind(Arena& arena) {
    x_.bind(arena);
    view_.val = arena.take_values(1);
    view_.adj = arena.take_adjoints(1);
    view_.shape = Shape::scalar();
  }

  std::span<const double> forward() {
    std::span<const double> xs = x_.forward();
    bool in_support = true;
    for (double xi : xs) in_support = in_support && xi >= lo_ && xi <= hi_;
    view_.val[0] =
        in_support ? -n_ * log_width_ : -std::numeric_limits<double>::infinity();
    return view_.val;
  }

  void backward() {}

  template <class F>
  void deposit(F&& seed) {
    view_.adj[0] = seed(0);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  X x_;
  double lo_, hi_;
  double log_width_;
  double n_{1.0};
  ValueAdjView view_{};
};

template <class X>
  requires(IntoExpr<X> && !std::same_as<shape_tag_t<lifted_t<X>>, mat>)
auto uniform_lpdf(X&& x, double lo, double hi) {
  return UniformLpdfNode<lifted_t<X>>(detail::lift(std::forward<X>(x)), lo, hi);
}

}  // namespace adkit
