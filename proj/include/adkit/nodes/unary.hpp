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

// Elementwise unary kernels. f computes the value; df gives the local
// derivative from the input x and the stored result fx, so backward never
// recomputes a transcendental that forward already produced (exp and sqrt
// reuse fx directly). check() guards the real domain; NaN slips through the
// comparisons and propagates, by policy.
namespace ops {

struct Sin {
  static void check(double) {}
  static double f(double x) { return std::sin(x); }
  static double df(double x, double) { return std::cos(x); }
};

struct Cos {
  static void check(double) {}
  static double f(double x) { return std::cos(x); }
  static double df(double x, double) { return -std::sin(x); }
};

struct Tan {
  static void check(double) {}
  static double f(double x) { return std::tan(x); }
  static double df(double, double fx) { return 1.0 + fx * fx; }
};

struct Log {
  static void check(double x) {
    if (x <= 0.0) throw DomainError("log of non-positive input");
  }
  static double f(double x) { return std::log(x); }
  static double df(double x, double) { return 1.0 / x; }
};

struct Exp {
  static void check(double) {}
  static double f(double x) { return std::exp(x); }
  static double df(double, double fx) { return fx; }
};

struct Sqrt {
  static void check(double x) {
    if (x < 0.0) throw DomainError("sqrt of negative input");
  }
  static double f(double x) { return std::sqrt(x); }
  static double df(double, double fx) { return 0.5 / fx; }
};

struct Neg {
  static void check(double) {}
  static double f(double x) { return -x; }
  static double df(double, double) { return -1.0; }
};

}  // namespace ops

/// Elementwise unary operation; output shape equals the child shape.
template <class Op, Expr Child>
class UnaryNode {
 public:
  using shape_tag = shape_tag_t<Child>;
  static constexpr bool is_constant_expr = false;

  explicit UnaryNode(Child child) : child_(std::move(child)), shape_(child_.shape()) {}

  Shape shape() const { return shape_; }
  BindSize self_size() const { return {shape_.size(), shape_.size()}; }
  BindSize bind_size() const { return child_.bind_size() + self_size(); }

  void bind(Arena& arena) {
    child_.bind(arena);
    view_.val = arena.take_values(shape_.size());
    view_.adj = arena.take_adjoints(shape_.size());
    view_.shape = shape_;
  }

  std::span<const double> forward() {
    std::span<const double> x = child_.forward();
    for (std::size_t i = 0; i < x.size(); ++i) {
      Op::check(x[i]);
      view_.val[i] = Op::f(x[i]);
    }
    return view_.val;
  }

  void backward() {
    if constexpr (!is_constant_expr_v<Child>) {
      std::span<const double> x = child_.values();
      std::span<const double> fx = view_.val;
      std::span<const double> seed = view_.adj;
      child_.deposit([=](std::size_t i) { return seed[i] * Op::df(x[i], fx[i]); });
      child_.backward();
    }
  }

  template <class F>
  void deposit(F&& seed) {
    for (std::size_t i = 0; i < view_.adj.size(); ++i) view_.adj[i] = seed(i);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  Child child_;
  Shape shape_;
  ValueAdjView view_{};
};

namespace detail {
template <class T>
concept UnaryOperand = IntoExpr<T> && !is_arith_operand_v<T>;
}

template <detail::UnaryOperand T>
auto sin(T&& t) {
  return UnaryNode<ops::Sin, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto cos(T&& t) {
  return UnaryNode<ops::Cos, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto tan(T&& t) {
  return UnaryNode<ops::Tan, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto log(T&& t) {
  return UnaryNode<ops::Log, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto exp(T&& t) {
  return UnaryNode<ops::Exp, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto sqrt(T&& t) {
  return UnaryNode<ops::Sqrt, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::UnaryOperand T>
auto operator-(T&& t) {
  return UnaryNode<ops::Neg, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

}  // namespace adkit
