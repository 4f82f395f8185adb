#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "adkit/error.hpp"
#include "adkit/expr.hpp"
#include "adkit/shape.hpp"

namespace adkit {

/// Leaf container: a value buffer and an equally sized adjoint buffer.
/// Expressions hold VarRef/VarElemRef nodes pointing at it, so a Var is
/// pinned in memory (no copies, no moves). Adjoints start at zero and
/// accumulate across backward passes until reset_adjoints.
template <class Tag = scl>
class Var {
 public:
  using shape_tag = Tag;

  Var() requires std::same_as<Tag, scl> : Var(Shape::scalar()) {}

  explicit Var(double v) requires std::same_as<Tag, scl> : Var(Shape::scalar()) {
    values_[0] = v;
  }

  explicit Var(std::size_t n) requires std::same_as<Tag, vec> : Var(Shape::vector(n)) {}

  Var(std::size_t r, std::size_t c) requires std::same_as<Tag, mat>
      : Var(Shape::matrix(r, c)) {}

  Var(const Var&) = delete;
  Var& operator=(const Var&) = delete;

  Shape shape() const { return shape_; }
  std::size_t size() const { return shape_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> adjoints() { return adjoints_; }
  std::span<const double> adjoints() const { return adjoints_; }

  double value() const requires std::same_as<Tag, scl> { return values_[0]; }
  double adjoint() const requires std::same_as<Tag, scl> { return adjoints_[0]; }

  void set(double v) requires std::same_as<Tag, scl> { values_[0] = v; }

  void set(std::span<const double> xs) {
    if (xs.size() != values_.size())
      throw ShapeError("Var::set data size does not match the variable shape");
    std::copy(xs.begin(), xs.end(), values_.begin());
  }

  void reset_adjoints() { std::fill(adjoints_.begin(), adjoints_.end(), 0.0); }

 private:
  explicit Var(Shape s) : shape_(s), values_(s.size(), 0.0), adjoints_(s.size(), 0.0) {}

  Shape shape_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
};

template <class... Tags>
void reset_adjoints(Var<Tags>&... vars) {
  (vars.reset_adjoints(), ...);
}

/// Leaf reference node. Declares zero storage: values are read from the
/// container and seeds increment the container's adjoints, which is how
/// multiple references to one variable sum their contributions.
template <class Tag>
class VarRef {
 public:
  using shape_tag = Tag;
  static constexpr bool is_constant_expr = false;

  explicit VarRef(Var<Tag>& v) : var_(&v) {}

  Shape shape() const { return var_->shape(); }
  BindSize self_size() const { return {0, 0}; }
  BindSize bind_size() const { return {0, 0}; }
  void bind(Arena&) {}

  std::span<const double> forward() { return var_->values(); }
  void backward() {}
  std::span<const double> values() const { return var_->values(); }

  template <class F>
  void deposit(F&& seed) {
    std::span<double> adj = var_->adjoints();
    for (std::size_t i = 0; i < adj.size(); ++i) adj[i] += seed(i);
  }

  Var<Tag>& var() const { return *var_; }

 private:
  Var<Tag>* var_;
};

/// Scalar view of one element of a vector variable.
class VarElemRef {
 public:
  using shape_tag = scl;
  static constexpr bool is_constant_expr = false;

  VarElemRef(Var<vec>& v, std::size_t index) : var_(&v), index_(index) {
    if (index >= v.size()) throw ShapeError("element index out of range");
  }

  Shape shape() const { return Shape::scalar(); }
  BindSize self_size() const { return {0, 0}; }
  BindSize bind_size() const { return {0, 0}; }
  void bind(Arena&) {}

  std::span<const double> forward() { return values(); }
  void backward() {}
  std::span<const double> values() const { return var_->values().subspan(index_, 1); }

  template <class F>
  void deposit(F&& seed) {
    var_->adjoints()[index_] += seed(0);
  }

 private:
  Var<vec>* var_;
  std::size_t index_;
};

template <class Tag>
VarRef<Tag> ref(Var<Tag>& v) {
  return VarRef<Tag>(v);
}

inline VarElemRef elem(Var<vec>& v, std::size_t index) { return VarElemRef(v, index); }

namespace detail {

template <class E>
  requires Expr<std::remove_cvref_t<E>>
std::remove_cvref_t<E> lift(E&& e) {
  return std::forward<E>(e);
}

template <class Tag>
VarRef<Tag> lift(Var<Tag>& v) {
  return VarRef<Tag>(v);
}

}  // namespace detail

}  // namespace adkit
