#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace adkit::tape {

/// Central-difference gradient of a black-box scalar function. The step for
/// coordinate i is h_scale * max(1, |x_i|), balancing truncation against
/// rounding at double precision. Non-finite function values flow into the
/// result untouched.
template <class F>
std::vector<double> finite_diff_gradient(F&& f, std::span<const double> x,
                                         double h_scale = 1e-6) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = h_scale * std::max(1.0, std::fabs(x[i]));
    const double xi = point[i];
    point[i] = xi + h;
    const double up = f(std::span<const double>(point));
    point[i] = xi - h;
    const double down = f(std::span<const double>(point));
    point[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace adkit::tape
