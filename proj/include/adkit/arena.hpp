#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adkit/error.hpp"
#include "adkit/shape.hpp"

namespace adkit {

/// Two contiguous buffers that feed value and adjoint windows to bound
/// expressions. Binding carves disjoint windows front to back, so the sweep
/// order of forward and backward evaluation walks each region nearly
/// linearly. The arena may be larger than one expression needs; reset() lets
/// it be rebound to a different expression.
class Arena {
 public:
  Arena(std::size_t value_capacity, std::size_t adjoint_capacity)
      : values_(value_capacity, 0.0), adjoints_(adjoint_capacity, 0.0) {}

  explicit Arena(BindSize need) : Arena(need.values, need.adjoints) {}

  std::span<double> take_values(std::size_t n) {
    if (value_offset_ + n > values_.size())
      throw CapacityError("arena value region exhausted; size it with bind_size()");
    std::span<double> out(values_.data() + value_offset_, n);
    value_offset_ += n;
    return out;
  }

  std::span<double> take_adjoints(std::size_t n) {
    if (adjoint_offset_ + n > adjoints_.size())
      throw CapacityError("arena adjoint region exhausted; size it with bind_size()");
    std::span<double> out(adjoints_.data() + adjoint_offset_, n);
    adjoint_offset_ += n;
    return out;
  }

  void reset() { value_offset_ = adjoint_offset_ = 0; }

  std::size_t value_offset() const { return value_offset_; }
  std::size_t adjoint_offset() const { return adjoint_offset_; }
  std::size_t value_capacity() const { return values_.size(); }
  std::size_t adjoint_capacity() const { return adjoints_.size(); }

 private:
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::size_t value_offset_{0};
  std::size_t adjoint_offset_{0};
};

/// Windows a bound node holds into the arena. Both spans have the node's
/// output size; nodes that declare zero storage keep them empty.
struct ValueAdjView {
  std::span<double> val{};
  std::span<double> adj{};
  Shape shape{};
};

}  // namespace adkit
