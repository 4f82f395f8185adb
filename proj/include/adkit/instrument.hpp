#pragma once

#include <atomic>
#include <cstdint>

namespace adkit::instrument {

/// Counts full per-element sweeps over the data argument of a log-pdf node.
/// Constant-data fast paths contribute exactly one sweep, at construction.
inline std::atomic<std::uint64_t>& lpdf_data_passes() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

/// Counts seed deposits attempted on constant nodes. Parents skip constant
/// children during the reverse sweep, so this stays zero.
inline std::atomic<std::uint64_t>& constant_seed_writes() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

}  // namespace adkit::instrument
