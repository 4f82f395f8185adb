#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace adkit::bench {

/// Deterministic input generator. Scaling the raw 64-bit stream by hand (not
/// std distributions) keeps the values reproducible across standard library
/// implementations, so frozen test inputs stay frozen.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Positive values whose logs are centered on zero; long products of these
  /// stay far from overflow and underflow.
  double log_uniform(double log_half_width) {
    return std::exp(uniform(-log_half_width, log_half_width));
  }

 private:
  std::mt19937_64 gen_;
};

/// Stream-splits one seed per (label, size) pair, FNV-1a over the label.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  h ^= n + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h ^ seed;
}

}  // namespace adkit::bench
