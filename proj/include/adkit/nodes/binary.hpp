#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

// Elementwise binary kernels. dfl/dfr are the local derivatives with respect
// to the left and right operand; both may use the stored result v. Div's
// right derivative is written -v/b rather than -a/b^2 on purpose: it stays
// correct when the left operand is a placeholder element whose container was
// overwritten after this node's forward pass.
namespace ops {

struct Add {
  static double f(double a, double b) { return a + b; }
  static double dfl(double, double, double) { return 1.0; }
  static double dfr(double, double, double) { return 1.0; }
};

struct Sub {
  static double f(double a, double b) { return a - b; }
  static double dfl(double, double, double) { return 1.0; }
  static double dfr(double, double, double) { return -1.0; }
};

struct Mul {
  static double f(double a, double b) { return a * b; }
  static double dfl(double, double b, double) { return b; }
  static double dfr(double a, double, double) { return a; }
};

struct Div {
  static double f(double a, double b) { return a / b; }
  static double dfl(double, double b, double) { return 1.0 / b; }
  static double dfr(double, double b, double v) { return -v / b; }
};

struct Pow {
  static double f(double a, double b) { return std::pow(a, b); }
  static double dfl(double a, double b, double) { return b * std::pow(a, b - 1.0); }
  static double dfr(double a, double, double v) { return v * std::log(a); }
};

}  // namespace ops

namespace detail {

// Output tag under scalar broadcasting: equal tags pass through, a scalar
// side adopts the other side's tag. Anything else is ill-formed.
template <class L, class R>
struct broadcast_tag;
template <class T>
struct broadcast_tag<T, T> {
  using type = T;
};
template <class T>
struct broadcast_tag<scl, T> {
  using type = T;
};
template <class T>
struct broadcast_tag<T, scl> {
  using type = T;
};
template <>
struct broadcast_tag<scl, scl> {
  using type = scl;
};

template <class L, class R>
using broadcast_tag_t = typename broadcast_tag<L, R>::type;

}  // namespace detail

/// Elementwise binary operation. Operand shapes are equal, or exactly one
/// side is scalar; the output takes the non-scalar shape. During backward a
/// scalar side receives the sum of its broadcast seeds.
template <class Op, Expr L, Expr R>
class BinaryNode {
  static constexpr bool left_scl = std::same_as<shape_tag_t<L>, scl>;
  static constexpr bool right_scl = std::same_as<shape_tag_t<R>, scl>;

 public:
  using shape_tag = detail::broadcast_tag_t<shape_tag_t<L>, shape_tag_t<R>>;
  static constexpr bool is_constant_expr = false;

  BinaryNode(L left, R right) : left_(std::move(left)), right_(std::move(right)) {
    const Shape ls = left_.shape();
    const Shape rs = right_.shape();
    if constexpr (left_scl)
      shape_ = rs;
    else if constexpr (right_scl)
      shape_ = ls;
    else {
      if (ls != rs) throw ShapeError("elementwise operands must have equal shapes");
      shape_ = ls;
    }
  }

  Shape shape() const { return shape_; }
  BindSize self_size() const { return {shape_.size(), shape_.size()}; }
  BindSize bind_size() const {
    return left_.bind_size() + right_.bind_size() + self_size();
  }

  void bind(Arena& arena) {
    left_.bind(arena);
    right_.bind(arena);
    view_.val = arena.take_values(shape_.size());
    view_.adj = arena.take_adjoints(shape_.size());
    view_.shape = shape_;
  }

  std::span<const double> forward() {
    std::span<const double> a = left_.forward();
    std::span<const double> b = right_.forward();
    if constexpr (std::same_as<Op, ops::Pow> && !is_constant_expr_v<R>) {
      // Real-valued derivative of the exponent needs log of the base.
      for (double ai : a)
        if (ai <= 0.0) throw DomainError("pow with differentiable exponent needs a positive base");
    }
    const std::size_t n = shape_.size();
    for (std::size_t i = 0; i < n; ++i)
      view_.val[i] = Op::f(a[left_scl ? 0 : i], b[right_scl ? 0 : i]);
    return view_.val;
  }

  void backward() {
    std::span<const double> a = left_.values();
    std::span<const double> b = right_.values();
    std::span<const double> v = view_.val;
    std::span<const double> seed = view_.adj;
    const std::size_t n = shape_.size();

    if constexpr (!is_constant_expr_v<R>) {
      if constexpr (right_scl && !left_scl) {
        right_.deposit([=](std::size_t) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += seed[i] * Op::dfr(a[i], b[0], v[i]);
          return s;
        });
      } else {
        right_.deposit([=](std::size_t i) {
          return seed[i] * Op::dfr(a[left_scl ? 0 : i], b[i], v[i]);
        });
      }
      right_.backward();
    }

    if constexpr (!is_constant_expr_v<L>) {
      if constexpr (left_scl && !right_scl) {
        left_.deposit([=](std::size_t) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += seed[i] * Op::dfl(a[0], b[i], v[i]);
          return s;
        });
      } else {
        left_.deposit([=](std::size_t i) {
          return seed[i] * Op::dfl(a[i], b[right_scl ? 0 : i], v[i]);
        });
      }
      left_.backward();
    }
  }

  template <class F>
  void deposit(F&& seed) {
    for (std::size_t i = 0; i < view_.adj.size(); ++i) view_.adj[i] = seed(i);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  L left_;
  R right_;
  Shape shape_{};
  ValueAdjView view_{};
};

template <class Op, class L, class R>
  requires BinaryOperands<L, R>
auto make_binary(L&& l, R&& r) {
  return BinaryNode<Op, lifted_t<L>, lifted_t<R>>(detail::lift(std::forward<L>(l)),
                                                  detail::lift(std::forward<R>(r)));
}

template <class L, class R>
  requires BinaryOperands<L, R>
auto operator+(L&& l, R&& r) {
  return make_binary<ops::Add>(std::forward<L>(l), std::forward<R>(r));
}

template <class L, class R>
  requires BinaryOperands<L, R>
auto operator-(L&& l, R&& r) {
  return make_binary<ops::Sub>(std::forward<L>(l), std::forward<R>(r));
}

template <class L, class R>
  requires BinaryOperands<L, R>
auto operator*(L&& l, R&& r) {
  return make_binary<ops::Mul>(std::forward<L>(l), std::forward<R>(r));
}

template <class L, class R>
  requires BinaryOperands<L, R>
auto operator/(L&& l, R&& r) {
  return make_binary<ops::Div>(std::forward<L>(l), std::forward<R>(r));
}

template <class L, class R>
  requires BinaryOperands<L, R>
auto pow(L&& l, R&& r) {
  return make_binary<ops::Pow>(std::forward<L>(l), std::forward<R>(r));
}

}  // namespace adkit
