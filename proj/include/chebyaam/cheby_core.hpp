#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chebyaam {

/// Truncated Chebyshev expansion of the angular-margin transform
///
///   psi(x, m) = cos(arccos(x) + m),   x in [-1, 1]
///
/// stored as coefficients a_0..a_n where n is the degree (highest index).
/// The series value is a_0 + sum_{k>=1} a_k T_k(x): a_0 is the full constant
/// term, so a_0 = -2 sin(m)/pi is the mean of psi under the Chebyshev weight.
class ChebyshevSeries {
public:
    /// Closed-form coefficients for margin m in [0, pi/2) and degree >= 1.
    /// Throws std::invalid_argument otherwise.
    static ChebyshevSeries for_margin(double margin, int degree);

    double margin() const noexcept { return margin_; }
    int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    std::span<const double> coefficients() const noexcept { return coefficients_; }
    double operator[](std::size_t k) const { return coefficients_.at(k); }

private:
    ChebyshevSeries(double margin, std::vector<double> coefficients)
        : margin_(margin), coefficients_(std::move(coefficients)) {}

    double margin_;
    std::vector<double> coefficients_;
};

/// Same as ChebyshevSeries::for_margin.
ChebyshevSeries coefficients(double margin, int degree);

/// Chebyshev polynomial of the first kind by three-term recurrence.
double cheb_t(int k, double x);

/// Chebyshev polynomial of the second kind by three-term recurrence.
/// Finite at the endpoints: U_k(1) = k + 1.
double cheb_u(int k, double x);

/// Clenshaw backward recurrence for sum_k c_k T_k(x) with c_0 taken as the
/// full constant term. No domain check.
double clenshaw_t(std::span<const double> c, double x) noexcept;

/// Clenshaw backward recurrence for sum_k c_k U_k(x). No domain check.
double clenshaw_u(std::span<const double> c, double x) noexcept;

/// T-coefficients of the derivative of sum_k c_k T_k (full-constant convention
/// on both sides). Returns {0} for constant input.
std::vector<double> derivative_coefficients(std::span<const double> c);

/// Series value at x. Throws std::domain_error if |x| > 1.
double clenshaw_eval(const ChebyshevSeries& series, double x);

/// psi(x, m) via x cos m - sqrt(1 - x^2) sin m.
double exact_psi(double x, double margin);

/// d psi / dx = cos m + x sin m / sqrt(1 - x^2). Infinite at x = +-1 for m > 0.
double exact_psi_derivative(double x, double margin);

/// d^2 psi / dx^2 = sin m (1 - x^2)^{-3/2}.
double exact_psi_hessian(double x, double margin);

/// First derivative of the truncated series, sum_k k a_k U_{k-1}(x).
double series_derivative(const ChebyshevSeries& series, double x);

/// Distance from +-1 inside which series_hessian leaves the trigonometric
/// form (0/0 at the endpoints) for the polynomial recurrence.
inline constexpr double kHessianSwitchEps = 1e-6;

/// Second derivative of the truncated series. Finite on all of [-1, 1].
double series_hessian(const ChebyshevSeries& series, double x);

/// max |series_derivative| over a uniform grid on [-1, 1] including both
/// endpoints. Throws std::invalid_argument if grid_points < 2.
double lipschitz_constant(const ChebyshevSeries& series, std::size_t grid_points = 100001);

/// Tail bound sum_{k>K} |a_{2k}| = 2 sin m / (pi (2K + 1)), 2K the largest even
/// index <= degree. Bounds sup |psi - series| since |T_k| <= 1.
double approx_error_bound(double margin, int degree);

}  // namespace chebyaam
