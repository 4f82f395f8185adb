#pragma once

#include <cstddef>

#include "adkit/error.hpp"

namespace adkit {

// Shape kind tags. Variables and nodes carry one as a template parameter so
// overload selection (broadcasting, matmul operand roles, reductions) happens
// at compile time; the runtime Shape only carries extents.
struct scl {};
struct vec {};
struct mat {};

enum class ShapeKind { Scalar, Vector, Matrix };

template <class Tag>
struct shape_kind_of;
template <>
struct shape_kind_of<scl> {
  static constexpr ShapeKind value = ShapeKind::Scalar;
};
template <>
struct shape_kind_of<vec> {
  static constexpr ShapeKind value = ShapeKind::Vector;
};
template <>
struct shape_kind_of<mat> {
  static constexpr ShapeKind value = ShapeKind::Matrix;
};

/// Runtime extent of a variable or node output. Scalars are 1x1, vectors are
/// n x 1 and matrices are r x c, stored column-major.
struct Shape {
  ShapeKind kind{ShapeKind::Scalar};
  std::size_t rows{1};
  std::size_t cols{1};

  static Shape scalar() { return {ShapeKind::Scalar, 1, 1}; }

  static Shape vector(std::size_t n) {
    if (n == 0) throw ShapeError("vector shape needs at least one element");
    return {ShapeKind::Vector, n, 1};
  }

  static Shape matrix(std::size_t r, std::size_t c) {
    if (r == 0 || c == 0) throw ShapeError("matrix shape needs positive extents");
    return {ShapeKind::Matrix, r, c};
  }

  std::size_t size() const { return rows * cols; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Number of value and adjoint doubles an expression consumes from an arena.
struct BindSize {
  std::size_t values{0};
  std::size_t adjoints{0};

  BindSize& operator+=(const BindSize& o) {
    values += o.values;
    adjoints += o.adjoints;
    return *this;
  }
  friend BindSize operator+(BindSize a, const BindSize& b) { return a += b; }
  friend bool operator==(const BindSize&, const BindSize&) = default;
};

}  // namespace adkit
