#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "adkit/arena.hpp"
#include "adkit/error.hpp"
#include "adkit/expr.hpp"
#include "adkit/instrument.hpp"
#include "adkit/shape.hpp"
#include "adkit/var.hpp"

namespace adkit {

/// Immutable data lifted into an expression. Owns its payload; bind copies it
/// into an arena value window once, and backward is a no-op. Parents skip
/// constant children during the reverse sweep; a stray deposit is counted but
/// never stored, so tests can assert the no-write guarantee.
template <class Tag = scl>
class Constant {
 public:
  using shape_tag = Tag;
  static constexpr bool is_constant_expr = true;

  explicit Constant(double v) requires std::same_as<Tag, scl>
      : shape_(Shape::scalar()), data_(1, v) {}

  explicit Constant(std::vector<double> xs) requires std::same_as<Tag, vec>
      : shape_(Shape::vector(xs.size())), data_(std::move(xs)) {}

  Constant(std::vector<double> xs, std::size_t r, std::size_t c)
    requires std::same_as<Tag, mat>
      : shape_(Shape::matrix(r, c)), data_(std::move(xs)) {
    if (data_.size() != shape_.size())
      throw ShapeError("constant matrix data does not match its extents");
  }

  Shape shape() const { return shape_; }
  BindSize self_size() const { return {shape_.size(), 0}; }
  BindSize bind_size() const { return self_size(); }

  void bind(Arena& arena) {
    view_.val = arena.take_values(shape_.size());
    view_.shape = shape_;
    std::copy(data_.begin(), data_.end(), view_.val.begin());
  }

  std::span<const double> forward() { return values(); }
  void backward() {}
  std::span<const double> values() const { return data_; }

  template <class F>
  void deposit(F&&) {
    instrument::constant_seed_writes().fetch_add(1, std::memory_order_relaxed);
  }

 private:
  Shape shape_;
  std::vector<double> data_;
  ValueAdjView view_{};
};

inline Constant<scl> constant(double v) { return Constant<scl>(v); }

inline Constant<vec> constant(std::vector<double> xs) {
  return Constant<vec>(std::move(xs));
}

inline Constant<mat> constant_matrix(std::vector<double> xs, std::size_t r,
                                     std::size_t c) {
  return Constant<mat>(std::move(xs), r, c);
}

namespace detail {

template <class T>
  requires std::is_arithmetic_v<T>
Constant<scl> lift(T v) {
  return Constant<scl>(static_cast<double>(v));
}

}  // namespace detail

/// Anything an operator accepts: an expression node, a Var lvalue, or an
/// arithmetic literal (lifted to a scalar constant).
template <class T>
concept IntoExpr = requires(T&& t) { detail::lift(std::forward<T>(t)); };

template <class T>
using lifted_t = decltype(detail::lift(std::declval<T>()));

namespace detail {
template <class T>
inline constexpr bool is_arith_operand_v = std::is_arithmetic_v<std::remove_cvref_t<T>>;
}

/// Valid operand pair for a binary operator: both liftable and at least one
/// side is already expression-like (keeps plain double arithmetic alone).
template <class L, class R>
concept BinaryOperands = IntoExpr<L> && IntoExpr<R> &&
                         !(detail::is_arith_operand_v<L> && detail::is_arith_operand_v<R>);

}  // namespace adkit
