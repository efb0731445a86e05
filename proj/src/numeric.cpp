#include "chebyaam/numeric.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace chebyaam {

double grid_node(double lo, double hi, std::size_t n, std::size_t i) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (i + 1 == n) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 8;
    if (values.size() <= kBlock) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::string format_shortest(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
    return std::string(buf.data(), end);
}

}  // namespace chebyaam
