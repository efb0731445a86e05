#include "chebyaam/numcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "chebyaam/cheby_core.hpp"
#include "chebyaam/numeric.hpp"

namespace chebyaam::numcheck {

double finite_diff_grad(const ScalarFn& f, double x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

ScanReport scan(const ScalarFn& f, double lo, double hi, std::size_t n) {
    if (n < 2) throw std::invalid_argument("scan needs at least 2 points");
    if (!(lo < hi)) throw std::invalid_argument("scan needs lo < hi");
    ScanReport report;
    report.grid.reserve(n);
    report.values.reserve(n);
    report.argmax = lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid_node(lo, hi, n, i);
        const double v = f(x);
        report.grid.push_back(x);
        report.values.push_back(v);
        if (std::isfinite(v) && std::abs(v) > report.max_abs) {
            report.max_abs = std::abs(v);
            report.argmax = x;
        }
    }
    return report;
}

double max_abs_error(double margin, int degree, std::size_t n) {
    const auto series = ChebyshevSeries::for_margin(margin, degree);
    return scan([&](double x) { return exact_psi(x, margin) - clenshaw_eval(series, x); }, -1.0, 1.0, n).max_abs;
}

}  // namespace chebyaam::numcheck
