#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chebyaam/cheby_core.hpp"
#include "chebyaam/matrix.hpp"

namespace chebyaam {

enum class LossKind { n_softmax, a_softmax, am_softmax, aam_softmax, cheby_aam };

inline constexpr double kDefaultScale = 32.0;
inline constexpr double kDefaultMargin = 0.3;
inline constexpr int kDefaultDegree = 30;
inline constexpr int kDefaultASoftmaxMargin = 2;
inline constexpr double kDefaultAmMargin = 0.2;

/// Inputs to arccos-based paths are clamped to [-1 + eps, 1 - eps].
inline constexpr double kArccosClampEps = 1e-7;

/// CLI spelling: nsoftmax, asoftmax, amsoftmax, aamsoftmax, chebyaam.
std::string_view loss_name(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view name);

/// Loss family member plus its hyperparameters. `margin` is radians for
/// AAM/ChebyAAM, a cosine offset for AM, and an integer multiplier for A.
struct LossSpec {
    LossKind kind = LossKind::cheby_aam;
    double margin = kDefaultMargin;
    double scale = kDefaultScale;
    int degree = kDefaultDegree;

    /// Throws std::invalid_argument if the invariants of `kind` do not hold.
    void validate() const;

    static LossSpec n_softmax(double scale = kDefaultScale);
    static LossSpec a_softmax(int margin = kDefaultASoftmaxMargin, double scale = kDefaultScale);
    static LossSpec am_softmax(double margin = kDefaultAmMargin, double scale = kDefaultScale);
    static LossSpec aam_softmax(double margin = kDefaultMargin, double scale = kDefaultScale);
    static LossSpec cheby_aam(double margin = kDefaultMargin, int degree = kDefaultDegree,
                              double scale = kDefaultScale);
};

/// The target-logit transform psi of a loss, with its derivative. Holds the
/// Chebyshev series for CHEBY_AAM so repeated evaluation does not rebuild it.
class TargetTransform {
public:
    explicit TargetTransform(const LossSpec& spec);

    const LossSpec& spec() const noexcept { return spec_; }

    /// psi(x). Throws std::domain_error if |x| > 1.
    double value(double x) const;
    /// d psi / dx. AAM at exactly |x| = 1 is evaluated at the clamped point.
    double derivative(double x) const;
    /// True if value/derivative at x went through the clamp.
    bool clamps(double x) const;

    const std::optional<ChebyshevSeries>& series() const noexcept { return series_; }

private:
    LossSpec spec_;
    std::optional<ChebyshevSeries> series_;
};

double transform_target_logit(const LossSpec& spec, double x);

/// Per-sample class cosines with one ground-truth label per row.
class CosineBatch {
public:
    /// Throws std::invalid_argument on shape/label errors and on non-finite
    /// or out-of-range cosines.
    CosineBatch(Matrix cosines, std::vector<int> labels);

    const Matrix& cosines() const noexcept { return cosines_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t classes() const noexcept { return cosines_.cols(); }

private:
    Matrix cosines_;
    std::vector<int> labels_;
};

/// Cosines uniform on [-limit, limit] and uniform labels, seeded.
CosineBatch random_cosine_batch(std::size_t rows, std::size_t classes, std::uint64_t seed, double limit = 0.95);

/// Default margin for a loss kind: 0 (N), 2 (A), 0.2 (AM), 0.3 (AAM, ChebyAAM).
double default_margin(LossKind kind);

struct LossOutput {
    std::vector<double> per_sample_loss;
    double mean_loss = 0.0;
    /// d mean_loss / d cosine, same shape as the batch.
    Matrix grad_cosines;
    /// Number of target entries whose transform hit the arccos clamp.
    std::size_t clamped_targets = 0;
};

/// Softmax cross-entropy over s * [psi(x_y), x_j (j != y)] with analytic
/// gradient. Rows are independent; the mean uses pairwise summation.
LossOutput loss_forward(const LossSpec& spec, const CosineBatch& batch);
LossOutput loss_forward(const TargetTransform& transform, const CosineBatch& batch);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    /// Largest |analytic d per-sample loss / d target cosine| in the batch.
    double max_target_grad = 0.0;
    /// Set when max_target_grad exceeds kLargeGradient.
    bool large_target_grad = false;
    bool clamped = false;
};

inline constexpr double kLargeGradient = 100.0;
/// Relative errors use max(|analytic|, |numeric|, kGradCheckFloor) as the
/// denominator so entries with negligible gradient are compared absolutely.
inline constexpr double kGradCheckFloor = 1e-3;

/// Compares analytic grad_cosines against central differences of mean_loss.
/// Throws std::invalid_argument if step <= 0.
GradCheckReport loss_grad_check(const LossSpec& spec, const CosineBatch& batch, double step = 1e-5);

/// Derivative of the two-class loss w.r.t. the target logit s_p, with the
/// non-target logit s_n passed through.
double binary_loss_derivative(const TargetTransform& transform, double s_p, double s_n);

/// d loss / d s_p on an n x n uniform grid over [-1, 1]^2. Row index runs
/// over s_p, column index over s_n.
Matrix binary_derivative_surface(const LossSpec& spec, std::size_t grid_n);

}  // namespace chebyaam
