#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "adkit/adkit.hpp"

namespace adkit::models {

/// Linear-regression log joint: data (X, y) enters as constants, the
/// differentiated parameters are the weights, intercept and noise scale.
///
///   y     ~ Normal(X w + b, sigma^2)
///   w, b  ~ Normal(0, 1)
///   sigma ~ Uniform(0.1, 10)
struct RegressionProblem {
  RegressionProblem(std::size_t n_rows, std::size_t n_cols)
      : n(n_rows), p(n_cols), x_data(n_rows * n_cols, 0.0), y_data(n_rows, 0.0),
        w(n_cols) {}

  std::size_t n;
  std::size_t p;
  std::vector<double> x_data;  // n x p, column-major
  std::vector<double> y_data;
  Var<vec> w;
  Var<scl> b;
  Var<scl> sigma;
};

/// Log joint density of the problem, up to additive constants. X and y are
/// baked in as constant nodes, so the reverse sweep never writes for them.
inline auto build_regression(RegressionProblem& prob) {
  if (prob.x_data.size() != prob.n * prob.p || prob.y_data.size() != prob.n)
    throw ShapeError("regression data does not match the declared extents");
  return normal_lpdf(constant(prob.y_data),
                     matmul(constant_matrix(prob.x_data, prob.n, prob.p), ref(prob.w)) +
                         ref(prob.b),
                     ref(prob.sigma)) +
         normal_lpdf(ref(prob.w), 0.0, 1.0) + normal_lpdf(ref(prob.b), 0.0, 1.0) +
         uniform_lpdf(ref(prob.sigma), 0.1, 10.0);
}

}  // namespace adkit::models
