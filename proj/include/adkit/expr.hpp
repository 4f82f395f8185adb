#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>

#include "adkit/arena.hpp"
#include "adkit/error.hpp"
#include "adkit/shape.hpp"

namespace adkit {

namespace detail {
// Archetype seed functor used to concept-check deposit().
struct ZeroSeed {
  double operator()(std::size_t) const { return 0.0; }
};
}  // namespace detail

// The node contract. An expression is a value type assembled at construction
// time; no storage exists until bind() attaches it to an arena. Protocol per
// evaluation pass:
//
//   forward()    fills every node's value window, children first, left to
//                right, and returns the root's values.
//   deposit(f)   receives the node's seed (adjoint of the root with respect
//                to this node's output), element by element. Leaf references
//                accumulate into their container; other nodes overwrite
//                their adjoint window, which is sound because the tree form
//                gives every node exactly one parent.
//   backward()   turns the received seed into child seeds by the chain rule
//                and recurses right to left. Leaves and constants stop the
//                recursion; constants are skipped by their parents entirely.
template <class T>
concept Expr = requires(T t, const T ct, Arena& arena, detail::ZeroSeed zs) {
  typename T::shape_tag;
  { T::is_constant_expr } -> std::convertible_to<bool>;
  { ct.shape() } -> std::same_as<Shape>;
  { ct.self_size() } -> std::same_as<BindSize>;
  { ct.bind_size() } -> std::same_as<BindSize>;
  { t.bind(arena) } -> std::same_as<void>;
  { t.forward() } -> std::same_as<std::span<const double>>;
  { t.backward() } -> std::same_as<void>;
  { ct.values() } -> std::same_as<std::span<const double>>;
  { t.deposit(zs) } -> std::same_as<void>;
};

template <class T>
using shape_tag_t = typename std::remove_cvref_t<T>::shape_tag;

template <class T>
inline constexpr bool is_constant_expr_v = std::remove_cvref_t<T>::is_constant_expr;

template <class T>
concept ScalarExpr = Expr<T> && std::same_as<shape_tag_t<T>, scl>;

/// Total storage the expression needs, summed over all nodes. Pure; performs
/// no allocation.
template <Expr E>
BindSize bind_size(const E& e) {
  return e.bind_size();
}

/// Attaches every node of the expression to windows of the arena, in forward
/// evaluation order. Requires a fresh (or reset) arena; afterwards the arena
/// offsets equal bind_size(e) exactly.
template <Expr E>
E& bind(E& e, Arena& arena) {
  assert(arena.value_offset() == 0 && arena.adjoint_offset() == 0);
  e.bind(arena);
  return e;
}

template <Expr E>
std::span<const double> forward(E& e) {
  return e.forward();
}

/// Reverse sweep from an explicit seed of the root's shape. Leaf adjoints
/// accumulate; use reset_adjoints on the variables between independent
/// evaluations.
template <Expr E>
void backward(E& e, std::span<const double> seed) {
  if (seed.size() != e.shape().size())
    throw ShapeError("backward seed must match the root shape");
  e.deposit([seed](std::size_t i) { return seed[i]; });
  e.backward();
}

template <ScalarExpr E>
void backward(E& e, double seed = 1.0) {
  e.deposit([seed](std::size_t) { return seed; });
  e.backward();
}

/// One full reverse-mode pass: forward, then backward with unit seed.
/// Returns the function value; the gradient lands in the leaf containers.
template <ScalarExpr E>
double autodiff(E& e) {
  double value = e.forward()[0];
  backward(e, 1.0);
  return value;
}

/// Expression plus an arena sized exactly for it, bound and ready to
/// evaluate. The usual way to own a reusable differentiable function.
template <Expr E>
class BoundExpr {
 public:
  explicit BoundExpr(E expr) : expr_(std::move(expr)), arena_(expr_.bind_size()) {
    bind(expr_, arena_);
  }

  // Copying would alias the source's arena through the copied windows. Moves
  // are fine: the arena's buffers are heap-stable under move.
  BoundExpr(const BoundExpr&) = delete;
  BoundExpr& operator=(const BoundExpr&) = delete;
  BoundExpr(BoundExpr&&) = default;
  BoundExpr& operator=(BoundExpr&&) = default;

  E& expr() { return expr_; }
  const E& expr() const { return expr_; }
  Arena& arena() { return arena_; }

 private:
  E expr_;
  Arena arena_;
};

template <Expr E>
BoundExpr<std::remove_cvref_t<E>> make_bound(E&& e) {
  return BoundExpr<std::remove_cvref_t<E>>(std::forward<E>(e));
}

}  // namespace adkit
