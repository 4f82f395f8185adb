#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/expr.hpp"
#include "adkit/var.hpp"

namespace adkit {

namespace detail {

template <Expr E>
void deposit_zero(E& e) {
  e.deposit([](std::size_t) { return 0.0; });
}

}  // namespace detail

/// Placeholder assignment: forward copies the child's result into the target
/// variable (and the node's own value window); downstream expressions read
/// the target as an ordinary leaf. During the reverse sweep the target's
/// accumulated adjoint is moved into the node's adjoint window and the
/// target's adjoint is cleared before seeding the child. Clearing first is
/// what makes self-referential updates (v gets f(v)) unwind correctly: reads
/// of the pre-assignment value sitting inside the child re-increment the
/// target afterwards.
template <class Tag, Expr Child>
class AssignNode {
 public:
  using shape_tag = Tag;
  static constexpr bool is_constant_expr = false;

  AssignNode(Var<Tag>& target, Child child)
      : target_(&target), child_(std::move(child)) {
    if (target.shape() != child_.shape())
      throw ShapeError("assignment target and source shapes differ");
  }

  Shape shape() const { return target_->shape(); }
  BindSize self_size() const { return {shape().size(), shape().size()}; }
  BindSize bind_size() const { return child_.bind_size() + self_size(); }

  void bind(Arena& arena) {
    child_.bind(arena);
    const std::size_t n = shape().size();
    view_.val = arena.take_values(n);
    view_.adj = arena.take_adjoints(n);
    view_.shape = shape();
  }

  std::span<const double> forward() {
    std::span<const double> x = child_.forward();
    std::copy(x.begin(), x.end(), view_.val.begin());
    std::copy(x.begin(), x.end(), target_->values().begin());
    return view_.val;
  }

  void backward() {
    std::span<double> tadj = target_->adjoints();
    for (std::size_t i = 0; i < tadj.size(); ++i) {
      view_.adj[i] = tadj[i];
      tadj[i] = 0.0;
    }
    if constexpr (!is_constant_expr_v<Child>) {
      std::span<const double> seed = view_.adj;
      child_.deposit([seed](std::size_t i) { return seed[i]; });
      child_.backward();
    }
  }

  // The node's output is the target variable itself, so seeds land there.
  template <class F>
  void deposit(F&& seed) {
    std::span<double> tadj = target_->adjoints();
    for (std::size_t i = 0; i < tadj.size(); ++i) tadj[i] += seed(i);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  Var<Tag>* target_;
  Child child_;
  ValueAdjView view_{};
};

/// Single-element assignment into a vector variable; the scalar counterpart
/// of AssignNode with the same consume-and-clear reverse semantics.
template <ScalarExpr Child>
class AssignElemNode {
 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  AssignElemNode(Var<vec>& target, std::size_t index, Child child)
      : target_(&target), index_(index), child_(std::move(child)) {
    if (index >= target.size()) throw ShapeError("element index out of range");
  }

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
    const double v = child_.forward()[0];
    view_.val[0] = v;
    target_->values()[index_] = v;
    return view_.val;
  }

  void backward() {
    double& tadj = target_->adjoints()[index_];
    view_.adj[0] = tadj;
    tadj = 0.0;
    if constexpr (!is_constant_expr_v<Child>) {
      const double seed = view_.adj[0];
      child_.deposit([seed](std::size_t) { return seed; });
      child_.backward();
    }
  }

  template <class F>
  void deposit(F&& seed) {
    target_->adjoints()[index_] += seed(0);
  }

  std::span<const double> values() const { return view_.val; }

 private:
  Var<vec>* target_;
  std::size_t index_;
  Child child_;
  ValueAdjView view_{};
};

/// Fixed list of sub-expressions: forward runs them in order, backward in
/// reverse order. The sequence's output is the last element's output, so
/// seeds route there; earlier elements whose outputs are unused receive a
/// zero seed before their own backward step.
template <Expr... Es>
class SeqNode {
  static constexpr std::size_t N = sizeof...(Es);
  static_assert(N >= 1, "sequence needs at least one element");
  using Last = std::tuple_element_t<N - 1, std::tuple<Es...>>;

 public:
  using shape_tag = shape_tag_t<Last>;
  static constexpr bool is_constant_expr = false;

  explicit SeqNode(Es... es) : elems_(std::move(es)...) {}

  Shape shape() const { return std::get<N - 1>(elems_).shape(); }

  BindSize self_size() const { return {0, 0}; }

  BindSize bind_size() const {
    BindSize total{};
    std::apply([&](const Es&... es) { ((total += es.bind_size()), ...); }, elems_);
    return total;
  }

  void bind(Arena& arena) {
    std::apply([&](Es&... es) { (es.bind(arena), ...); }, elems_);
  }

  std::span<const double> forward() {
    std::span<const double> out{};
    std::apply([&](Es&... es) { ((out = es.forward()), ...); }, elems_);
    return out;
  }

  void backward() {
    backward_from<N - 1>();
  }

  template <class F>
  void deposit(F&& seed) {
    std::get<N - 1>(elems_).deposit(std::forward<F>(seed));
  }

  std::span<const double> values() const { return std::get<N - 1>(elems_).values(); }

 private:
  template <std::size_t I>
  void backward_from() {
    if constexpr (I != N - 1) detail::deposit_zero(std::get<I>(elems_));
    std::get<I>(elems_).backward();
    if constexpr (I > 0) backward_from<I - 1>();
  }

  std::tuple<Es...> elems_;
};

template <class... Ts>
  requires(IntoExpr<Ts> && ...)
auto seq(Ts&&... ts) {
  return SeqNode<lifted_t<Ts>...>(detail::lift(std::forward<Ts>(ts))...);
}

/// Comma chaining: (a, b) evaluates a then b and takes b's output.
template <Expr A, Expr B>
auto operator,(A&& a, B&& b) {
  return SeqNode<std::remove_cvref_t<A>, std::remove_cvref_t<B>>(
      std::forward<A>(a), std::forward<B>(b));
}

/// Runtime-length sequence of same-typed statements, for update chains whose
/// length is a data size rather than a compile-time constant. Same ordering
/// contract as SeqNode.
template <Expr E>
class LoopNode {
 public:
  using shape_tag = shape_tag_t<E>;
  static constexpr bool is_constant_expr = false;

  explicit LoopNode(std::vector<E> elems) : elems_(std::move(elems)) {
    if (elems_.empty()) throw ConfigError("loop needs at least one statement");
  }

  Shape shape() const { return elems_.back().shape(); }
  BindSize self_size() const { return {0, 0}; }

  BindSize bind_size() const {
    BindSize total{};
    for (const E& e : elems_) total += e.bind_size();
    return total;
  }

  void bind(Arena& arena) {
    for (E& e : elems_) e.bind(arena);
  }

  std::span<const double> forward() {
    std::span<const double> out{};
    for (E& e : elems_) out = e.forward();
    return out;
  }

  void backward() {
    for (std::size_t i = elems_.size(); i-- > 0;) {
      if (i != elems_.size() - 1) detail::deposit_zero(elems_[i]);
      elems_[i].backward();
    }
  }

  template <class F>
  void deposit(F&& seed) {
    elems_.back().deposit(std::forward<F>(seed));
  }

  std::span<const double> values() const { return elems_.back().values(); }

 private:
  std::vector<E> elems_;
};

template <Expr E>
LoopNode<E> loop(std::vector<E> elems) {
  return LoopNode<E>(std::move(elems));
}

template <class Tag, class T>
  requires IntoExpr<T>
auto assign(Var<Tag>& target, T&& value) {
  return AssignNode<Tag, lifted_t<T>>(target, detail::lift(std::forward<T>(value)));
}

template <class T>
  requires IntoExpr<T>
auto assign_elem(Var<vec>& target, std::size_t index, T&& value) {
  return AssignElemNode<lifted_t<T>>(target, index,
                                     detail::lift(std::forward<T>(value)));
}

}  // namespace adkit
