#pragma once

#include <cstdint>

namespace testsupport {

/// Number of dynamic allocations made by this binary so far (global
/// operator new override in alloc_counter.cpp). Diff it around a code
/// region to assert the region allocates nothing.
std::uint64_t alloc_count();

}  // namespace testsupport
