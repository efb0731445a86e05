#include "chebyaam/margin_losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "chebyaam/numeric.hpp"
#include "chebyaam/rng.hpp"

namespace chebyaam {

namespace {

constexpr std::array<std::pair<LossKind, std::string_view>, 5> kLossNames{{
    {LossKind::n_softmax, "nsoftmax"},
    {LossKind::a_softmax, "asoftmax"},
    {LossKind::am_softmax, "amsoftmax"},
    {LossKind::aam_softmax, "aamsoftmax"},
    {LossKind::cheby_aam, "chebyaam"},
}};

double clamp_for_arccos(double x) {
    return std::clamp(x, -1.0 + kArccosClampEps, 1.0 - kArccosClampEps);
}

// 1 / (1 + exp(-z)) without overflow for large |z|.
double logistic(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::string_view loss_name(LossKind kind) {
    for (const auto& [k, name] : kLossNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) {
    for (const auto& [k, n] : kLossNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

void LossSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("loss scale must be positive and finite");
    }
    if (!(margin >= 0.0) || !std::isfinite(margin)) {
        throw std::invalid_argument("loss margin must be non-negative and finite");
    }
    switch (kind) {
        case LossKind::a_softmax:
            if (margin < 1.0 || margin != std::floor(margin)) {
                throw std::invalid_argument("A-Softmax margin must be a positive integer");
            }
            break;
        case LossKind::aam_softmax:
            if (margin >= std::numbers::pi / 2) throw std::invalid_argument("AAM margin must be < pi/2");
            break;
        case LossKind::cheby_aam:
            if (degree < 1) throw std::invalid_argument("ChebyAAM degree must be >= 1");
            if (margin >= std::numbers::pi / 2) throw std::invalid_argument("ChebyAAM margin must be < pi/2");
            break;
        case LossKind::n_softmax:
        case LossKind::am_softmax:
            break;
    }
}

LossSpec LossSpec::n_softmax(double scale) { return {LossKind::n_softmax, 0.0, scale, 0}; }
LossSpec LossSpec::a_softmax(int margin, double scale) {
    return {LossKind::a_softmax, static_cast<double>(margin), scale, 0};
}
LossSpec LossSpec::am_softmax(double margin, double scale) { return {LossKind::am_softmax, margin, scale, 0}; }
LossSpec LossSpec::aam_softmax(double margin, double scale) { return {LossKind::aam_softmax, margin, scale, 0}; }
LossSpec LossSpec::cheby_aam(double margin, int degree, double scale) {
    return {LossKind::cheby_aam, margin, scale, degree};
}

TargetTransform::TargetTransform(const LossSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.kind == LossKind::cheby_aam) series_ = ChebyshevSeries::for_margin(spec_.margin, spec_.degree);
}

bool TargetTransform::clamps(double x) const {
    switch (spec_.kind) {
        case LossKind::a_softmax: return std::abs(x) > 1.0 - kArccosClampEps;
        case LossKind::aam_softmax: return spec_.margin > 0.0 && std::abs(x) == 1.0;
        default: return false;
    }
}

double TargetTransform::value(double x) const {
    if (!(std::abs(x) <= 1.0)) throw std::domain_error("target cosine outside [-1, 1]");
    switch (spec_.kind) {
        case LossKind::n_softmax: return x;
        case LossKind::am_softmax: return x - spec_.margin;
        case LossKind::aam_softmax: return exact_psi(x, spec_.margin);
        case LossKind::cheby_aam: return clenshaw_eval(*series_, x);
        case LossKind::a_softmax: {
            // (-1)^k cos(m theta) - 2k with m theta in [k pi, (k+1) pi].
            const double m = spec_.margin;
            const double theta = std::acos(clamp_for_arccos(x));
            const int k = std::clamp(static_cast<int>(std::floor(m * theta / std::numbers::pi)), 0,
                                     static_cast<int>(m) - 1);
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            return sign * std::cos(m * theta) - 2.0 * k;
        }
    }
    return x;
}

double TargetTransform::derivative(double x) const {
    if (!(std::abs(x) <= 1.0)) throw std::domain_error("target cosine outside [-1, 1]");
    switch (spec_.kind) {
        case LossKind::n_softmax:
        case LossKind::am_softmax: return 1.0;
        case LossKind::aam_softmax: {
            const double at = clamps(x) ? clamp_for_arccos(x) : x;
            return exact_psi_derivative(at, spec_.margin);
        }
        case LossKind::cheby_aam: return series_derivative(*series_, x);
        case LossKind::a_softmax: {
            const double m = spec_.margin;
            const double xc = clamp_for_arccos(x);
            const double theta = std::acos(xc);
            const int k = std::clamp(static_cast<int>(std::floor(m * theta / std::numbers::pi)), 0,
                                     static_cast<int>(m) - 1);
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            return sign * m * std::sin(m * theta) / std::sqrt((1.0 - xc) * (1.0 + xc));
        }
    }
    return 1.0;
}

double transform_target_logit(const LossSpec& spec, double x) { return TargetTransform(spec).value(x); }

CosineBatch::CosineBatch(Matrix cosines, std::vector<int> labels)
    : cosines_(std::move(cosines)), labels_(std::move(labels)) {
    if (labels_.size() != cosines_.rows()) throw std::invalid_argument("one label per batch row required");
    for (double c : cosines_.data()) {
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite cosine in batch");
        if (c < -1.0 || c > 1.0) throw std::invalid_argument("cosine outside [-1, 1] in batch");
    }
    for (int y : labels_) {
        if (y < 0 || static_cast<std::size_t>(y) >= cosines_.cols()) {
            throw std::invalid_argument("label out of range: " + std::to_string(y));
        }
    }
}

CosineBatch random_cosine_batch(std::size_t rows, std::size_t classes, std::uint64_t seed, double limit) {
    if (!(limit >= 0.0 && limit <= 1.0)) throw std::invalid_argument("cosine limit must lie in [0, 1]");
    if (classes == 0) throw std::invalid_argument("batch needs at least one class");
    Rng rng(seed);
    Matrix cosines(rows, classes);
    std::vector<int> labels(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (double& c : cosines.row(i)) c = rng.uniform(-limit, limit);
        labels[i] = static_cast<int>(rng.below(classes));
    }
    return CosineBatch(std::move(cosines), std::move(labels));
}

double default_margin(LossKind kind) {
    switch (kind) {
        case LossKind::n_softmax: return 0.0;
        case LossKind::a_softmax: return kDefaultASoftmaxMargin;
        case LossKind::am_softmax: return kDefaultAmMargin;
        case LossKind::aam_softmax:
        case LossKind::cheby_aam: return kDefaultMargin;
    }
    return kDefaultMargin;
}

LossOutput loss_forward(const LossSpec& spec, const CosineBatch& batch) {
    return loss_forward(TargetTransform(spec), batch);
}

LossOutput loss_forward(const TargetTransform& transform, const CosineBatch& batch) {
    const std::size_t rows = batch.size();
    const std::size_t cols = batch.classes();
    if (rows == 0) throw std::invalid_argument("empty batch");
    if (cols < 2) throw std::invalid_argument("loss needs at least two classes");

    const double s = transform.spec().scale;
    const double inv_rows = 1.0 / static_cast<double>(rows);
    LossOutput out;
    out.per_sample_loss.resize(rows);
    out.grad_cosines = Matrix(rows, cols);
    std::vector<double> logits(cols);

    for (std::size_t i = 0; i < rows; ++i) {
        const auto x = batch.cosines().row(i);
        const auto y = static_cast<std::size_t>(batch.labels()[i]);
        for (std::size_t j = 0; j < cols; ++j) logits[j] = s * x[j];
        logits[y] = s * transform.value(x[y]);
        if (transform.clamps(x[y])) ++out.clamped_targets;

        const double zy = logits[y];
        const double zmax = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double& z : logits) {
            z = std::exp(z - zmax);
            denom += z;
        }
        // log(sum exp(z - zmax)) >= 0 and zmax - z_y >= 0.
        out.per_sample_loss[i] = std::log(denom) + (zmax - zy);

        auto g = out.grad_cosines.row(i);
        for (std::size_t j = 0; j < cols; ++j) g[j] = s * (logits[j] / denom) * inv_rows;
        g[y] = s * (logits[y] / denom - 1.0) * transform.derivative(x[y]) * inv_rows;
    }
    out.mean_loss = pairwise_sum(out.per_sample_loss) * inv_rows;
    return out;
}

GradCheckReport loss_grad_check(const LossSpec& spec, const CosineBatch& batch, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grad check step must be > 0");
    const TargetTransform transform(spec);
    const LossOutput analytic = loss_forward(transform, batch);

    GradCheckReport report;
    const double rows = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto y = static_cast<std::size_t>(batch.labels()[i]);
        const double g = std::abs(analytic.grad_cosines(i, y)) * rows;
        report.max_target_grad = std::max(report.max_target_grad, g);
    }
    report.large_target_grad = report.max_target_grad > kLargeGradient;
    report.clamped = analytic.clamped_targets > 0;

    Matrix probe = batch.cosines();
    for (std::size_t i = 0; i < probe.rows(); ++i) {
        for (std::size_t j = 0; j < probe.cols(); ++j) {
            const double x0 = probe(i, j);
            probe(i, j) = x0 + step;
            const double up = loss_forward(transform, CosineBatch(probe, batch.labels())).mean_loss;
            probe(i, j) = x0 - step;
            const double down = loss_forward(transform, CosineBatch(probe, batch.labels())).mean_loss;
            probe(i, j) = x0;

            const double numeric = (up - down) / (2.0 * step);
            const double a = analytic.grad_cosines(i, j);
            const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_row = i;
                report.worst_col = j;
            }
        }
    }
    return report;
}

double binary_loss_derivative(const TargetTransform& transform, double s_p, double s_n) {
    const double s = transform.spec().scale;
    // loss = log(1 + exp(s (s_n - psi(s_p)))), so 1 - p = logistic(s (s_n - psi)).
    const double miss = logistic(s * (s_n - transform.value(s_p)));
    return -s * miss * transform.derivative(s_p);
}

Matrix binary_derivative_surface(const LossSpec& spec, std::size_t grid_n) {
    if (grid_n < 2) throw std::invalid_argument("surface grid needs at least 2 points per axis");
    const TargetTransform transform(spec);
    Matrix out(grid_n, grid_n);
    for (std::size_t r = 0; r < grid_n; ++r) {
        const double sp = grid_node(-1.0, 1.0, grid_n, r);
        for (std::size_t c = 0; c < grid_n; ++c) {
            out(r, c) = binary_loss_derivative(transform, sp, grid_node(-1.0, 1.0, grid_n, c));
        }
    }
    return out;
}

}  // namespace chebyaam
