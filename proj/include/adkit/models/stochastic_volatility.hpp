#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "adkit/adkit.hpp"

namespace adkit::models {

/// Stochastic-volatility log joint. The latent log-volatility h is a
/// placeholder rebuilt from the standardized innovations by an in-expression
/// transformation chain, then the observations are scored with per-element
/// scale e^{h_i}:
///
///   y     ~ Normal(0, e^h)        (e^{h_i} as the standard deviation)
///   h_std ~ Normal(0, 1)
///   sigma ~ Cauchy(0, 5)
///   mu    ~ Cauchy(0, 10)
///   phi   ~ Uniform(-1, 1)
///   h     = h_std * sigma
///   h[0]  = h[0] / sqrt(1 - phi^2)
///   h     = h + mu
///   h[i]  = phi * (h[i-1] - mu),  i > 0   (in order)
struct SvProblem {
  explicit SvProblem(std::size_t n_obs)
      : n(n_obs), y_data(n_obs, 0.0), h_std(n_obs), h(n_obs) {}

  std::size_t n;
  std::vector<double> y_data;
  Var<vec> h_std;
  Var<vec> h;  // placeholder; overwritten by the transformation chain
  Var<scl> phi;
  Var<scl> sigma;
  Var<scl> mu;
};

/// Log joint density up to additive constants. Statements evaluate in the
/// listed order; the reverse sweep unwinds them back to front, so the
/// sequential h[i] updates differentiate correctly. Gradient targets:
/// h_std, h, phi, sigma, mu (h itself is fully overwritten, so its initial
/// value carries a zero gradient).
inline auto build_sv(SvProblem& prob) {
  if (prob.n < 2) throw ShapeError("stochastic volatility needs at least two steps");
  if (prob.y_data.size() != prob.n)
    throw ShapeError("observation data does not match the declared length");

  auto step = [&](std::size_t i) {
    return assign_elem(prob.h, i, ref(prob.phi) * (elem(prob.h, i - 1) - ref(prob.mu)));
  };
  std::vector<decltype(step(1))> scan;
  scan.reserve(prob.n - 1);
  for (std::size_t i = 1; i < prob.n; ++i) scan.push_back(step(i));

  return seq(
      assign(prob.h, ref(prob.h_std) * ref(prob.sigma)),
      assign_elem(prob.h, 0,
                  elem(prob.h, 0) / sqrt(1.0 - ref(prob.phi) * ref(prob.phi))),
      assign(prob.h, ref(prob.h) + ref(prob.mu)), loop(std::move(scan)),
      normal_lpdf(constant(prob.y_data), 0.0, exp(ref(prob.h))) +
          normal_lpdf(ref(prob.h_std), 0.0, 1.0) +
          cauchy_lpdf(ref(prob.sigma), 0.0, 5.0) +
          cauchy_lpdf(ref(prob.mu), 0.0, 10.0) +
          uniform_lpdf(ref(prob.phi), -1.0, 1.0));
}

/// Plain-loop recomputation of the transformation chain, for checking the
/// bound expression's forward pass reproduces it exactly.
inline std::vector<double> sv_transform_reference(std::span<const double> h_std,
                                                  double phi, double sigma,
                                                  double mu) {
  std::vector<double> h(h_std.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = h_std[i] * sigma;
  h[0] = h[0] / std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = h[i] + mu;
  for (std::size_t i = 1; i < h.size(); ++i) h[i] = phi * (h[i - 1] - mu);
  return h;
}

}  // namespace adkit::models
