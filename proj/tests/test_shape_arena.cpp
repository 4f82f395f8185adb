#include <catch2/catch_amalgamated.hpp>

#include "adkit/adkit.hpp"

using namespace adkit;

TEST_CASE("shape factories and invariants") {
  CHECK(Shape::scalar().size() == 1);
  CHECK(Shape::scalar().rows == 1);
  CHECK(Shape::scalar().cols == 1);

  const Shape v = Shape::vector(8);
  CHECK(v.rows == 8);
  CHECK(v.cols == 1);
  CHECK(v.size() == 8);

  const Shape m = Shape::matrix(3, 5);
  CHECK(m.size() == 15);

  CHECK_THROWS_AS(Shape::vector(0), ShapeError);
  CHECK_THROWS_AS(Shape::matrix(0, 2), ShapeError);
  CHECK_THROWS_AS(Shape::matrix(2, 0), ShapeError);
}

TEST_CASE("arena hands out disjoint windows and tracks offsets") {
  Arena arena(6, 4);
  auto a = arena.take_values(2);
  auto b = arena.take_values(3);
  CHECK(arena.value_offset() == 5);
  CHECK(a.data() + 2 == b.data());

  auto c = arena.take_adjoints(4);
  CHECK(arena.adjoint_offset() == 4);
  CHECK(c.size() == 4);

  CHECK_THROWS_AS(arena.take_values(2), CapacityError);
  CHECK_THROWS_AS(arena.take_adjoints(1), CapacityError);

  arena.reset();
  CHECK(arena.value_offset() == 0);
  CHECK(arena.adjoint_offset() == 0);
  CHECK_NOTHROW(arena.take_values(6));
}

TEST_CASE("bind_size counting rule") {
  Var<scl> x, y;
  Var<vec> v(8);

  CHECK(bind_size(ref(x)) == BindSize{0, 0});

  auto add = ref(x) + ref(y);
  CHECK(bind_size(add) == BindSize{1, 1});

  auto s = sum(ref(v));
  CHECK(bind_size(s) == BindSize{1, 1});

  // constants contribute values only
  auto c = constant(std::vector<double>{1, 2, 3});
  CHECK(bind_size(c) == BindSize{3, 0});

  // sequencing is additive over sub-expressions
  auto s2 = seq(ref(x) + ref(y), sum(ref(v)));
  CHECK(bind_size(s2) == BindSize{2, 2});
}

TEST_CASE("bind consumes exactly bind_size, slack permitted") {
  Var<scl> x, y;
  auto e = ref(x) + ref(y);

  SECTION("exact arena") {
    Arena arena(1, 1);
    bind(e, arena);
    CHECK(arena.value_offset() == 1);
    CHECK(arena.adjoint_offset() == 1);
  }

  SECTION("undersized arena") {
    Arena arena(0, 0);
    CHECK_THROWS_AS(bind(e, arena), CapacityError);
  }

  SECTION("oversized arena leaves slack") {
    Var<vec> v(8);
    auto s = sum(ref(v));
    Arena arena(5, 5);
    bind(s, arena);
    CHECK(arena.value_offset() == 1);
    CHECK(arena.adjoint_offset() == 1);
  }
}

TEST_CASE("windows match the output shape, zero storage for leaves") {
  Var<vec> v(6);
  auto e = exp(ref(v));
  Arena arena(e.bind_size());
  bind(e, arena);
  // shape law: value and adjoint windows both have shape.size() elements
  CHECK(e.shape().size() == 6);
  CHECK(e.values().size() == 6);
  CHECK(bind_size(ref(v)) == BindSize{0, 0});
}

TEST_CASE("exact consumption holds across a mixed expression suite") {
  Var<scl> x, y;
  Var<vec> v(4);
  Var<mat> a(2, 2), b(2, 2);

  auto check_exact = [](auto expr) {
    Arena arena(expr.bind_size());
    bind(expr, arena);
    CHECK(arena.value_offset() == expr.bind_size().values);
    CHECK(arena.adjoint_offset() == expr.bind_size().adjoints);
  };

  check_exact(sin(ref(x)) + cos(ref(y)) * ref(x) - log(1.0 + exp(ref(y))));
  check_exact(sum(exp(ref(v)) * 2.0));
  check_exact(sum(matmul(ref(a), ref(b))));
  check_exact(seq(assign(x, ref(y) * 3.0), ref(x) + ref(x)));
  check_exact(normal_lpdf(ref(v), ref(x), exp(ref(y))));
}
