#include "chebyaam/cheby_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "chebyaam/numeric.hpp"

namespace chebyaam {

namespace {

void require_unit_interval(double x, const char* what) {
    if (!(x >= -1.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + ": x must lie in [-1, 1], got " + std::to_string(x));
    }
}

// 1 - x^2 without the cancellation of the naive form near +-1.
double one_minus_sq(double x) { return (1.0 - x) * (1.0 + x); }

}  // namespace

ChebyshevSeries ChebyshevSeries::for_margin(double margin, int degree) {
    if (degree < 1) throw std::invalid_argument("degree must be >= 1, got " + std::to_string(degree));
    if (!(margin >= 0.0 && margin < std::numbers::pi / 2)) {
        throw std::invalid_argument("margin must lie in [0, pi/2), got " + std::to_string(margin));
    }
    std::vector<double> a(static_cast<std::size_t>(degree) + 1, 0.0);
    const double scale = 2.0 * std::sin(margin) / std::numbers::pi;
    a[0] = 0.0 - scale;
    a[1] = std::cos(margin);
    for (int k = 1; 2 * k <= degree; ++k) {
        a[static_cast<std::size_t>(2 * k)] = scale * (1.0 / (2 * k - 1) - 1.0 / (2 * k + 1));
    }
    return ChebyshevSeries(margin, std::move(a));
}

ChebyshevSeries coefficients(double margin, int degree) {
    return ChebyshevSeries::for_margin(margin, degree);
}

double cheb_t(int k, double x) {
    if (k < 0) throw std::invalid_argument("cheb_t: negative order");
    require_unit_interval(x, "cheb_t");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < k; ++j) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double cheb_u(int k, double x) {
    if (k < 0) throw std::invalid_argument("cheb_u: negative order");
    require_unit_interval(x, "cheb_u");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = 2.0 * x;
    for (int j = 1; j < k; ++j) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double clenshaw_t(std::span<const double> c, double x) noexcept {
    if (c.empty()) return 0.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        const double b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + x * b1 - b2;
}

double clenshaw_u(std::span<const double> c, double x) noexcept {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        const double b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return b1;
}

std::vector<double> derivative_coefficients(std::span<const double> c) {
    const std::size_t n = c.empty() ? 0 : c.size() - 1;
    if (n == 0) return {0.0};
    // d_{k-1} = d_{k+1} + 2k c_k, which yields the half-constant convention
    // for d_0; halve it back.
    std::vector<double> d(n + 2, 0.0);
    for (std::size_t k = n; k >= 1; --k) {
        d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * c[k];
    }
    d.resize(n);
    d[0] *= 0.5;
    return d;
}

double clenshaw_eval(const ChebyshevSeries& series, double x) {
    require_unit_interval(x, "clenshaw_eval");
    return clenshaw_t(series.coefficients(), x);
}

double exact_psi(double x, double margin) {
    require_unit_interval(x, "exact_psi");
    return x * std::cos(margin) - std::sqrt(one_minus_sq(x)) * std::sin(margin);
}

double exact_psi_derivative(double x, double margin) {
    require_unit_interval(x, "exact_psi_derivative");
    const double s = std::sin(margin);
    if (s == 0.0) return std::cos(margin);
    return std::cos(margin) + x * s / std::sqrt(one_minus_sq(x));
}

double exact_psi_hessian(double x, double margin) {
    require_unit_interval(x, "exact_psi_hessian");
    const double s = std::sin(margin);
    if (s == 0.0) return 0.0;
    return s / std::pow(one_minus_sq(x), 1.5);
}

double series_derivative(const ChebyshevSeries& series, double x) {
    require_unit_interval(x, "series_derivative");
    // sum_{k>=1} k a_k U_{k-1}(x), Clenshaw over U with coefficients k a_k.
    const auto a = series.coefficients();
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = a.size() - 1; k >= 1; --k) {
        const double b0 = static_cast<double>(k) * a[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return b1;
}

double series_hessian(const ChebyshevSeries& series, double x) {
    require_unit_interval(x, "series_hessian");
    const auto a = series.coefficients();
    if (std::abs(x) > 1.0 - kHessianSwitchEps) {
        const auto d2 = derivative_coefficients(derivative_coefficients(a));
        return clenshaw_t(d2, x);
    }
    // -sum_k a_k k (k T_k(x) sqrt(1-x^2) - x sin(k theta)) / (1-x^2)^{3/2}
    const double theta = std::acos(x);
    const double w = one_minus_sq(x);
    const double root = std::sqrt(w);
    double acc = 0.0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        if (a[k] == 0.0) continue;
        const double kd = static_cast<double>(k);
        acc += a[k] * kd * (kd * std::cos(kd * theta) * root - x * std::sin(kd * theta));
    }
    return -acc / (w * root);
}

double lipschitz_constant(const ChebyshevSeries& series, std::size_t grid_points) {
    if (grid_points < 2) throw std::invalid_argument("lipschitz_constant: grid_points must be >= 2");
    double best = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        best = std::max(best, std::abs(series_derivative(series, grid_node(-1.0, 1.0, grid_points, i))));
    }
    return best;
}

double approx_error_bound(double margin, int degree) {
    if (degree < 1) throw std::invalid_argument("approx_error_bound: degree must be >= 1");
    const int top_even = 2 * (degree / 2);
    return 2.0 * std::sin(margin) / (std::numbers::pi * (top_even + 1));
}

}  // namespace chebyaam
