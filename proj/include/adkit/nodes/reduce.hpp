#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

namespace ops {
struct SumReduce {};
struct ProdReduce {};
}  // namespace ops

/// Reduction of every element to a scalar. Sum broadcasts its seed back to
/// all elements. Prod divides the stored product by each element when none is
/// zero; with zeros present it falls back to leave-one-out products, which
/// stays division-free and exact (one zero: only that slot gets a nonzero
/// seed; two or more: the whole gradient is zero).
template <class Op, Expr Child>
class ReduceNode {
 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  explicit ReduceNode(Child child) : child_(std::move(child)) {}

  Shape shape() const { return Shape::scalar(); }
  BindSize self_size() const { return {1, 1}; }
  BindSize bind_size() const { return child_.bind_size() + self_size(); }

  void bind(Arena& arena) {
    child_.bind(arena);
    view_.val = arena.take_values(1);
    view_.adj = arena.take_adjoints(1);
    view_.shape = Shape::scalar();
  }

  std::span<const double> forward() {
    std::span<const double> x = child_.forward();
    double acc = std::same_as<Op, ops::ProdReduce> ? 1.0 : 0.0;
    if constexpr (std::same_as<Op, ops::SumReduce>)
      for (double xi : x) acc += xi;
    else
      for (double xi : x) acc *= xi;
    view_.val[0] = acc;
    return view_.val;
  }

  void backward() {
    if constexpr (is_constant_expr_v<Child>) return;

    const double seed = view_.adj[0];
    if constexpr (std::same_as<Op, ops::SumReduce>) {
      child_.deposit([seed](std::size_t) { return seed; });
    } else {
      std::span<const double> x = child_.values();
      std::size_t zeros = 0;
      std::size_t zero_at = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] == 0.0) {
          ++zeros;
          zero_at = i;
        }
      if (zeros == 0) {
        const double p = view_.val[0];
        child_.deposit([=](std::size_t i) { return seed * p / x[i]; });
      } else if (zeros == 1) {
        double rest = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (i != zero_at) rest *= x[i];
        child_.deposit(
            [=](std::size_t i) { return i == zero_at ? seed * rest : 0.0; });
      } else {
        child_.deposit([](std::size_t) { return 0.0; });
      }
    }
    child_.backward();
  }

  template <class F>
  void deposit(F&& seed) {
    view_.adj[0] = seed(0);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  Child child_;
  ValueAdjView view_{};
};

namespace detail {
template <class T>
concept ReduceOperand = IntoExpr<T> && !is_arith_operand_v<T>;
}

template <detail::ReduceOperand T>
auto sum(T&& t) {
  return ReduceNode<ops::SumReduce, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

template <detail::ReduceOperand T>
auto prod(T&& t) {
  return ReduceNode<ops::ProdReduce, lifted_t<T>>(detail::lift(std::forward<T>(t)));
}

}  // namespace adkit
