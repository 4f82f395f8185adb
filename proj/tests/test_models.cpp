#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "adkit/bench/cases.hpp"
#include "adkit/models/regression.hpp"
#include "adkit/models/stochastic_volatility.hpp"
#include "adkit/tape/finite_diff.hpp"

using namespace adkit;
using Catch::Approx;

TEST_CASE("regression log joint at the degenerate point") {
  models::RegressionProblem prob(1, 1);
  prob.x_data = {0.0};
  prob.y_data = {0.0};
  std::vector<double> w0 = {0.0};
  prob.w.set(w0);
  prob.b.set(0.0);
  prob.sigma.set(1.0);

  auto bound = make_bound(models::build_regression(prob));
  const double value = autodiff(bound.expr());
  CHECK(value == Approx(-std::log(9.9)).epsilon(1e-15));
  CHECK(prob.b.adjoint() == Approx(0.0).margin(1e-16));
  CHECK(prob.w.adjoints()[0] == Approx(0.0).margin(1e-16));
  // d/dsigma of -N log(sigma) at sigma=1 with zero residuals
  CHECK(prob.sigma.adjoint() == Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("regression gradients agree with the tape and finite differences") {
  bench::PreparedCase pc = bench::prepare_case("regression", 8, 2024);
  const double value = pc.run_static();
  std::vector<double> grad;
  pc.save_gradient(grad);

  auto tr = pc.run_tape();
  CHECK(value == Approx(tr.value).epsilon(1e-13));
  REQUIRE(grad.size() == tr.gradient.size());
  for (std::size_t i = 0; i < grad.size(); ++i)
    CHECK(grad[i] == Approx(tr.gradient[i]).epsilon(1e-12).margin(1e-13));
}

TEST_CASE("regression gradients match finite differences") {
  models::RegressionProblem prob(8, 3);
  std::mt19937_64 gen(314);
  auto u = [&](double lo, double hi) {
    return lo + (static_cast<double>(gen() >> 11) * 0x1.0p-53) * (hi - lo);
  };
  for (double& v : prob.x_data) v = u(-1.0, 1.0);
  for (double& v : prob.y_data) v = u(-1.0, 1.0);

  auto bound = make_bound(models::build_regression(prob));
  auto eval = [&](std::span<const double> pt) {
    prob.w.set(pt.subspan(0, 3));
    prob.b.set(pt[3]);
    prob.sigma.set(pt[4]);
    return forward(bound.expr())[0];
  };

  std::vector<double> pt = {u(-0.5, 0.5), u(-0.5, 0.5), u(-0.5, 0.5), u(-0.5, 0.5),
                            u(0.6, 1.8)};
  eval(pt);
  reset_adjoints(prob.w, prob.b, prob.sigma);
  backward(bound.expr(), 1.0);
  std::vector<double> grad(prob.w.adjoints().begin(), prob.w.adjoints().end());
  grad.push_back(prob.b.adjoint());
  grad.push_back(prob.sigma.adjoint());

  auto fd = tape::finite_diff_gradient(eval, pt);
  for (std::size_t i = 0; i < grad.size(); ++i)
    CHECK(grad[i] == Approx(fd[i]).epsilon(1e-6).margin(1e-6));
}

TEST_CASE("regression constants never receive seeds") {
  models::RegressionProblem prob(6, 3);
  std::mt19937_64 gen(9);
  auto u = [&] { return (static_cast<double>(gen() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
  for (double& v : prob.x_data) v = u();
  for (double& v : prob.y_data) v = u();
  std::vector<double> w0 = {0.1, -0.2, 0.3};
  prob.w.set(w0);
  prob.b.set(0.2);
  prob.sigma.set(1.3);

  auto bound = make_bound(models::build_regression(prob));
  const auto before = instrument::constant_seed_writes().load();
  autodiff(bound.expr());
  const auto after = instrument::constant_seed_writes().load();
  CHECK(after - before == 0);
}

TEST_CASE("stochastic volatility at the centered point") {
  models::SvProblem prob(2);
  prob.y_data = {0.0, 0.0};
  std::vector<double> hs = {0.0, 0.0};
  prob.h_std.set(hs);
  prob.phi.set(0.0);
  prob.sigma.set(1.0);
  prob.mu.set(0.0);

  auto bound = make_bound(models::build_sv(prob));
  const double value = autodiff(bound.expr());

  // term by term: y scores 0 (unit scales), h_std scores 0, then the two
  // cauchy priors and the phi uniform, constants dropped
  const double want = -(std::log(5.0) + std::log1p(1.0 / 25.0)) - std::log(10.0) -
                      std::log(2.0);
  CHECK(value == Approx(want).epsilon(1e-14));

  CHECK(prob.h.values()[0] == 0.0);
  CHECK(prob.h.values()[1] == 0.0);

  // overwritten placeholder carries no gradient
  CHECK(prob.h.adjoints()[0] == 0.0);
  CHECK(prob.h.adjoints()[1] == 0.0);

  // only the first element feeds back into h_std when phi = 0
  CHECK(prob.h_std.adjoints()[0] == Approx(-1.0).epsilon(1e-14));
  CHECK(prob.h_std.adjoints()[1] == Approx(0.0).margin(1e-16));
  CHECK(prob.mu.adjoint() == Approx(-1.0).epsilon(1e-14));
  CHECK(prob.sigma.adjoint() == Approx(-1.0 / 13.0).epsilon(1e-13));
  CHECK(prob.phi.adjoint() == Approx(0.0).margin(1e-15));
}

TEST_CASE("stochastic volatility transformation chain matches a plain loop exactly") {
  const std::size_t n = 16;
  models::SvProblem prob(n);
  std::mt19937_64 gen(1913);
  auto u = [&](double lo, double hi) {
    return lo + (static_cast<double>(gen() >> 11) * 0x1.0p-53) * (hi - lo);
  };
  for (double& v : prob.y_data) v = u(-1.0, 1.0);
  std::vector<double> hs(n);
  for (double& v : hs) v = u(-1.0, 1.0);
  prob.h_std.set(hs);
  prob.phi.set(0.6);
  prob.sigma.set(1.4);
  prob.mu.set(-0.5);

  auto bound = make_bound(models::build_sv(prob));
  forward(bound.expr());

  const std::vector<double> want = models::sv_transform_reference(
      hs, prob.phi.value(), prob.sigma.value(), prob.mu.value());
  for (std::size_t i = 0; i < n; ++i) CHECK(prob.h.values()[i] == want[i]);
}

TEST_CASE("stochastic volatility gradients agree with the tape oracle") {
  bench::PreparedCase pc = bench::prepare_case("stochastic_volatility", 16, 7);
  const double value = pc.run_static();
  std::vector<double> grad;
  pc.save_gradient(grad);

  auto tr = pc.run_tape();
  CHECK(value == Approx(tr.value).epsilon(1e-13));
  REQUIRE(grad.size() == tr.gradient.size());
  for (std::size_t i = 0; i < grad.size(); ++i)
    CHECK(grad[i] == Approx(tr.gradient[i]).epsilon(1e-12).margin(1e-13));
}

TEST_CASE("stochastic volatility gradient of mu matches finite differences") {
  const std::size_t n = 6;
  models::SvProblem prob(n);
  prob.y_data = {0.3, -0.1, 0.5, 0.0, -0.4, 0.2};
  std::vector<double> hs = {0.1, -0.3, 0.2, 0.0, 0.4, -0.2};
  prob.h_std.set(hs);
  prob.phi.set(0.5);
  prob.sigma.set(1.2);
  prob.mu.set(-0.3);

  auto bound = make_bound(models::build_sv(prob));
  autodiff(bound.expr());
  const double dmu = prob.mu.adjoint();

  auto eval = [&](std::span<const double> point) {
    prob.mu.set(point[0]);
    return forward(bound.expr())[0];
  };
  std::vector<double> at = {-0.3};
  auto fd = tape::finite_diff_gradient(eval, at);
  CHECK(dmu == Approx(fd[0]).epsilon(1e-6));
}

TEST_CASE("model forward values equal their handwritten baselines") {
  for (const char* name : {"regression", "stochastic_volatility"}) {
    bench::PreparedCase pc = bench::prepare_case(name, 32, 5);
    const double vs = pc.run_static();
    const double vb = pc.run_baseline();
    CHECK(vb == Approx(vs).epsilon(1e-12));
  }
}

TEST_CASE("model construction validates extents") {
  CHECK_THROWS_AS(
      [] {
        models::SvProblem p(1);
        return models::build_sv(p);
      }(),
      ShapeError);
  CHECK_THROWS_AS(
      [] {
        models::RegressionProblem p(4, 2);
        p.y_data.pop_back();
        return models::build_regression(p);
      }(),
      ShapeError);
}

TEST_CASE("stochastic volatility rejects |phi| >= 1 at forward time") {
  models::SvProblem prob(3);
  prob.y_data = {0.1, 0.2, 0.3};
  std::vector<double> hs = {0.0, 0.0, 0.0};
  prob.h_std.set(hs);
  prob.phi.set(1.5);
  prob.sigma.set(1.0);
  prob.mu.set(0.0);
  auto bound = make_bound(models::build_sv(prob));
  CHECK_THROWS_AS(forward(bound.expr()), DomainError);
}
