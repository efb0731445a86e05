#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace chebyaam {

/// i-th node of an n-point uniform grid on [lo, hi]; node n-1 is exactly hi.
double grid_node(double lo, double hi, std::size_t n, std::size_t i);

/// Pairwise (cascade) summation. Result is independent of thread scheduling
/// and has O(log n) error growth.
double pairwise_sum(std::span<const double> values);

/// Shortest decimal string that parses back to exactly `value`.
/// Non-finite values are written as "nan", "inf", "-inf".
std::string format_shortest(double value);

}  // namespace chebyaam
