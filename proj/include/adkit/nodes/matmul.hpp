#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

namespace detail {

template <class L, class R>
struct matmul_tag;
template <>
struct matmul_tag<mat, mat> {
  using type = mat;
};
template <>
struct matmul_tag<mat, vec> {
  using type = vec;
};

template <class L, class R>
using matmul_tag_t = typename matmul_tag<L, R>::type;

}  // namespace detail

/// Dense product of an r x k matrix with a k x c matrix (or k-vector, c = 1),
/// column-major. Backward pushes seed * B^T to the left operand and
/// A^T * seed to the right one, each fused into the child's deposit loop so
/// no temporary matrix is formed.
template <Expr L, Expr R>
class MatMulNode {
 public:
  using shape_tag = detail::matmul_tag_t<shape_tag_t<L>, shape_tag_t<R>>;
  static constexpr bool is_constant_expr = false;

  MatMulNode(L left, R right) : left_(std::move(left)), right_(std::move(right)) {
    const Shape ls = left_.shape();
    const Shape rs = right_.shape();
    if (ls.cols != rs.rows)
      throw ShapeError("matmul inner dimensions do not agree");
    rows_ = ls.rows;
    inner_ = ls.cols;
    cols_ = rs.cols;
    shape_ = std::same_as<shape_tag, vec> ? Shape::vector(rows_)
                                          : Shape::matrix(rows_, cols_);
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
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < inner_; ++t)
          acc += a[i + t * rows_] * b[t + j * inner_];
        view_.val[i + j * rows_] = acc;
      }
    return view_.val;
  }

  void backward() {
    std::span<const double> a = left_.values();
    std::span<const double> b = right_.values();
    std::span<const double> seed = view_.adj;
    const std::size_t r = rows_, k = inner_, c = cols_;

    if constexpr (!is_constant_expr_v<R>) {
      // right seed (i, j) = sum_t A(t, i) * seed(t, j)
      right_.deposit([=](std::size_t flat) {
        const std::size_t i = flat % k, j = flat / k;
        double acc = 0.0;
        for (std::size_t t = 0; t < r; ++t) acc += a[t + i * r] * seed[t + j * r];
        return acc;
      });
      right_.backward();
    }
    if constexpr (!is_constant_expr_v<L>) {
      // left seed (i, j) = sum_t seed(i, t) * B(j, t)
      left_.deposit([=](std::size_t flat) {
        const std::size_t i = flat % r, j = flat / r;
        double acc = 0.0;
        for (std::size_t t = 0; t < c; ++t) acc += seed[i + t * r] * b[j + t * k];
        return acc;
      });
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
  std::size_t rows_{0}, inner_{0}, cols_{0};
  ValueAdjView view_{};
};

template <class L, class R>
  requires BinaryOperands<L, R>
auto matmul(L&& l, R&& r) {
  return MatMulNode<lifted_t<L>, lifted_t<R>>(detail::lift(std::forward<L>(l)),
                                              detail::lift(std::forward<R>(r)));
}

}  // namespace adkit
