// Property tests: the static engine, the tape oracle, and (where cheap)
// finite differences must agree on randomized inputs across composite
// expressions that mix every node family.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "adkit/adkit.hpp"
#include "adkit/tape/tape.hpp"

using namespace adkit;
using Catch::Approx;

namespace {

struct PropRng {
  std::mt19937_64 gen;
  explicit PropRng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return lo + (static_cast<double>(gen() >> 11) * 0x1.0p-53) * (hi - lo);
  }
};

struct PropCase {
  std::string name;
  std::size_t dim;
  std::function<double(std::span<const double>)> value_of_point;
  std::function<std::vector<double>(std::span<const double>)> grad_of_point;
  std::function<tape::TapeResult(std::span<const double>)> oracle;
  std::function<double(PropRng&, std::size_t)> draw;
};

// elementwise mix over two vectors: sum(exp(a) .* b + a ./ (1.5 + b .* b))
PropCase elementwise_mix() {
  const std::size_t n = 6;
  auto a = std::make_shared<Var<vec>>(n);
  auto b = std::make_shared<Var<vec>>(n);
  auto make = [&] {
    return sum(exp(ref(*a)) * ref(*b) + ref(*a) / (1.5 + ref(*b) * ref(*b)));
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "elementwise mix";
  c.dim = 2 * n;
  c.value_of_point = [=](std::span<const double> pt) {
    a->set(pt.subspan(0, n));
    b->set(pt.subspan(n, n));
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    a->set(pt.subspan(0, n));
    b->set(pt.subspan(n, n));
    reset_adjoints(*a, *b);
    autodiff(bound->expr());
    std::vector<double> g(a->adjoints().begin(), a->adjoints().end());
    g.insert(g.end(), b->adjoints().begin(), b->adjoints().end());
    return g;
  };
  c.oracle = [n](std::span<const double> pt) {
    return tape::tape_grad(
        [n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar acc = t.constant(0.0);
          for (std::size_t i = 0; i < n; ++i) {
            tape::TapeVar ai = in[i], bi = in[n + i];
            acc = acc + exp(ai) * bi + ai / (1.5 + bi * bi);
          }
          return acc;
        },
        pt);
  };
  c.draw = [](PropRng& r, std::size_t) { return r.uniform(-1.5, 1.5); };
  return c;
}

// broadcast and reductions: s * sum(v) + prod(v) / (s*s + 1) - lse(v)
PropCase reduction_mix() {
  const std::size_t n = 5;
  auto s = std::make_shared<Var<scl>>();
  auto v = std::make_shared<Var<vec>>(n);
  auto make = [&] {
    return ref(*s) * sum(ref(*v)) + prod(ref(*v)) / (ref(*s) * ref(*s) + 1.0) -
           log(sum(exp(ref(*v))));
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "reduction mix";
  c.dim = 1 + n;
  c.value_of_point = [=](std::span<const double> pt) {
    s->set(pt[0]);
    v->set(pt.subspan(1, n));
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    s->set(pt[0]);
    v->set(pt.subspan(1, n));
    reset_adjoints(*s, *v);
    autodiff(bound->expr());
    std::vector<double> g = {s->adjoint()};
    g.insert(g.end(), v->adjoints().begin(), v->adjoints().end());
    return g;
  };
  c.oracle = [n](std::span<const double> pt) {
    return tape::tape_grad(
        [n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar sv = in[0];
          tape::TapeVar total = t.constant(0.0);
          tape::TapeVar product = t.constant(1.0);
          std::vector<tape::TapeVar> exps;
          for (std::size_t i = 0; i < n; ++i) {
            total = total + in[1 + i];
            product = product * in[1 + i];
            exps.push_back(exp(in[1 + i]));
          }
          return sv * total + product / (sv * sv + 1.0) - log(t.sum(exps));
        },
        pt);
  };
  c.draw = [](PropRng& r, std::size_t) { return r.uniform(0.2, 1.6); };
  return c;
}

// matrix product with a scaled readout plus pow with a constant base
PropCase matrix_mix() {
  auto a = std::make_shared<Var<mat>>(3, 3);
  auto b = std::make_shared<Var<mat>>(3, 3);
  auto make = [&] {
    return sum(matmul(ref(*a), ref(*b))) * 0.5 + sum(pow(2.0, ref(*b)));
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "matrix mix";
  c.dim = 18;
  c.value_of_point = [=](std::span<const double> pt) {
    a->set(pt.subspan(0, 9));
    b->set(pt.subspan(9, 9));
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    a->set(pt.subspan(0, 9));
    b->set(pt.subspan(9, 9));
    reset_adjoints(*a, *b);
    autodiff(bound->expr());
    std::vector<double> g(a->adjoints().begin(), a->adjoints().end());
    g.insert(g.end(), b->adjoints().begin(), b->adjoints().end());
    return g;
  };
  c.oracle = [](std::span<const double> pt) {
    return tape::tape_grad(
        [](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          std::vector<tape::TapeVar> cells;
          for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) {
              tape::TapeVar acc = t.constant(0.0);
              for (std::size_t k = 0; k < 3; ++k)
                acc = acc + in[i + k * 3] * in[9 + k + j * 3];
              cells.push_back(acc);
            }
          tape::TapeVar total = t.sum(cells) * 0.5;
          for (std::size_t i = 0; i < 9; ++i)
            total = total + pow(t.constant(2.0), in[9 + i]);
          return total;
        },
        pt);
  };
  c.draw = [](PropRng& r, std::size_t) { return r.uniform(-1.2, 1.2); };
  return c;
}

// log densities with a transformed scale
PropCase lpdf_mix() {
  const std::size_t n = 4;
  auto x = std::make_shared<Var<vec>>(n);
  auto mu = std::make_shared<Var<scl>>();
  auto ls = std::make_shared<Var<scl>>();
  auto make = [&] {
    return normal_lpdf(ref(*x), ref(*mu), exp(ref(*ls))) +
           cauchy_lpdf(ref(*mu), 0.0, 2.5) + uniform_lpdf(ref(*ls), -3.0, 3.0);
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "lpdf mix";
  c.dim = n + 2;
  c.value_of_point = [=](std::span<const double> pt) {
    x->set(pt.subspan(0, n));
    mu->set(pt[n]);
    ls->set(pt[n + 1]);
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    x->set(pt.subspan(0, n));
    mu->set(pt[n]);
    ls->set(pt[n + 1]);
    reset_adjoints(*x, *mu, *ls);
    autodiff(bound->expr());
    std::vector<double> g(x->adjoints().begin(), x->adjoints().end());
    g.push_back(mu->adjoint());
    g.push_back(ls->adjoint());
    return g;
  };
  c.oracle = [n](std::span<const double> pt) {
    return tape::tape_grad(
        [n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar m = in[n];
          tape::TapeVar scale = exp(in[n + 1]);
          tape::TapeVar acc = t.constant(0.0);
          for (std::size_t i = 0; i < n; ++i) {
            tape::TapeVar u = (in[i] - m) / scale;
            acc = acc + u * u * (-0.5) - log(scale);
          }
          tape::TapeVar um = m / 2.5;
          acc = acc - log(t.constant(2.5)) - log(1.0 + um * um);
          return acc + t.constant(-std::log(6.0));  // uniform on [-3, 3]
        },
        pt);
  };
  c.draw = [n](PropRng& r, std::size_t i) {
    if (i < n) return r.uniform(-2.0, 2.0);
    return i == n ? r.uniform(-1.0, 1.0) : r.uniform(-0.8, 0.8);
  };
  return c;
}

// placeholder statements with downstream reads
PropCase placeholder_mix() {
  auto y = std::make_shared<Var<scl>>();
  auto z = std::make_shared<Var<scl>>();
  auto x = std::make_shared<Var<scl>>();
  auto w = std::make_shared<Var<scl>>();
  auto make = [&] {
    return seq(assign(*x, ref(*y) * ref(*z) + sin(ref(*z))),
               assign(*w, ref(*x) * ref(*x) / (1.0 + ref(*y) * ref(*y))),
               ref(*w) - ref(*z) * ref(*x));
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "placeholder mix";
  c.dim = 2;
  c.value_of_point = [=](std::span<const double> pt) {
    y->set(pt[0]);
    z->set(pt[1]);
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    y->set(pt[0]);
    z->set(pt[1]);
    reset_adjoints(*y, *z, *x, *w);
    autodiff(bound->expr());
    return std::vector<double>{y->adjoint(), z->adjoint()};
  };
  c.oracle = [](std::span<const double> pt) {
    return tape::tape_grad(
        [](tape::Tape&, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar xx = in[0] * in[1] + sin(in[1]);
          tape::TapeVar ww = xx * xx / (1.0 + in[0] * in[0]);
          return ww - in[1] * xx;
        },
        pt);
  };
  c.draw = [](PropRng& r, std::size_t) { return r.uniform(-1.5, 1.5); };
  return c;
}

// in-place prefix products over a placeholder vector
PropCase scan_mix() {
  const std::size_t n = 5;
  auto v = std::make_shared<Var<vec>>(n);
  auto acc = std::make_shared<Var<vec>>(n + 1);
  auto make = [&] {
    using Step = decltype(assign_elem(*acc, 1, elem(*acc, 0) * elem(*v, 0)));
    std::vector<Step> steps;
    for (std::size_t i = 0; i < n; ++i)
      steps.push_back(assign_elem(*acc, i + 1, elem(*acc, i) * elem(*v, i)));
    return seq(assign_elem(*acc, 0, constant(1.0) + 0.0), loop(std::move(steps)),
               elem(*acc, n) + sum(ref(*v)));
  };
  auto bound = std::make_shared<BoundExpr<decltype(make())>>(make());

  PropCase c;
  c.name = "scan mix";
  c.dim = n;
  c.value_of_point = [=](std::span<const double> pt) {
    v->set(pt);
    return forward(bound->expr())[0];
  };
  c.grad_of_point = [=](std::span<const double> pt) {
    v->set(pt);
    reset_adjoints(*v, *acc);
    autodiff(bound->expr());
    return std::vector<double>(v->adjoints().begin(), v->adjoints().end());
  };
  c.oracle = [n](std::span<const double> pt) {
    return tape::tape_grad(
        [n](tape::Tape& t, const std::vector<tape::TapeVar>& in) {
          tape::TapeVar run = t.constant(1.0);
          for (std::size_t i = 0; i < n; ++i) run = run * in[i];
          tape::TapeVar total = t.constant(0.0);
          for (std::size_t i = 0; i < n; ++i) total = total + in[i];
          return run + total;
        },
        pt);
  };
  c.draw = [](PropRng& r, std::size_t) { return r.uniform(-1.4, 1.4); };
  return c;
}

std::vector<PropCase> prop_cases() {
  std::vector<PropCase> cases;
  cases.push_back(elementwise_mix());
  cases.push_back(reduction_mix());
  cases.push_back(matrix_mix());
  cases.push_back(lpdf_mix());
  cases.push_back(placeholder_mix());
  cases.push_back(scan_mix());
  return cases;
}

}  // namespace

TEST_CASE("static engine and tape oracle agree at random points") {
  for (PropCase& c : prop_cases()) {
    CAPTURE(c.name);
    PropRng rng(0xC0FFEE ^ std::hash<std::string>{}(c.name));
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> pt(c.dim);
      for (std::size_t i = 0; i < c.dim; ++i) pt[i] = c.draw(rng, i);

      const double v = c.value_of_point(pt);
      const std::vector<double> g = c.grad_of_point(pt);
      const tape::TapeResult oracle = c.oracle(pt);

      CHECK(v == Approx(oracle.value).epsilon(1e-12).margin(1e-13));
      REQUIRE(g.size() == oracle.gradient.size());
      for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == Approx(oracle.gradient[i]).epsilon(1e-11).margin(1e-12));
    }
  }
}

TEST_CASE("seeds act linearly at random points and random scales") {
  const std::size_t n = 5;
  Var<scl> s;
  Var<vec> v(n);
  auto bound = make_bound(ref(s) * sum(ref(v)) +
                          prod(ref(v)) / (ref(s) * ref(s) + 1.0) -
                          log(sum(exp(ref(v)))));

  PropRng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    s.set(rng.uniform(0.2, 1.6));
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.uniform(0.2, 1.6);
    v.set(xs);

    forward(bound.expr());
    reset_adjoints(s, v);
    backward(bound.expr(), 1.0);
    std::vector<double> unit = {s.adjoint()};
    unit.insert(unit.end(), v.adjoints().begin(), v.adjoints().end());

    const double c = rng.uniform(-3.0, 3.0);
    reset_adjoints(s, v);
    backward(bound.expr(), c);
    std::vector<double> scaled = {s.adjoint()};
    scaled.insert(scaled.end(), v.adjoints().begin(), v.adjoints().end());

    for (std::size_t i = 0; i < unit.size(); ++i)
      CHECK(scaled[i] == Approx(c * unit[i]).epsilon(1e-14).margin(1e-15));
  }
}

TEST_CASE("backward passes accumulate until adjoints are reset") {
  Var<vec> v(4);
  std::vector<double> xs = {0.4, -0.7, 1.1, 0.2};
  v.set(xs);
  auto bound = make_bound(log(sum(exp(ref(v)))) * 2.0);

  autodiff(bound.expr());
  const std::vector<double> once(v.adjoints().begin(), v.adjoints().end());
  autodiff(bound.expr());
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(v.adjoints()[i] == Approx(2.0 * once[i]).epsilon(1e-14));

  v.reset_adjoints();
  autodiff(bound.expr());
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(v.adjoints()[i] == Approx(once[i]).epsilon(1e-14));
}
