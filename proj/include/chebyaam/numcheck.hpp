#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace chebyaam::numcheck {

using ScalarFn = std::function<double(double)>;

inline constexpr double kFirstDerivativeStep = 1e-5;
inline constexpr double kSecondDerivativeStep = 1e-4;

/// Central difference (f(x+h) - f(x-h)) / 2h. Throws std::invalid_argument
/// if h <= 0; domain errors from f propagate.
double finite_diff_grad(const ScalarFn& f, double x, double h = kFirstDerivativeStep);

struct ScanReport {
    std::vector<double> grid;
    std::vector<double> values;
    double max_abs = 0.0;
    double argmax = 0.0;
};

/// Samples f on an n-point uniform grid over [lo, hi] including both ends.
/// Non-finite samples are kept in `values` but excluded from max_abs.
ScanReport scan(const ScalarFn& f, double lo, double hi, std::size_t n);

/// Grid sup-norm of exact_psi - clenshaw_eval over [-1, 1].
double max_abs_error(double margin, int degree, std::size_t n = 100001);

}  // namespace chebyaam::numcheck
