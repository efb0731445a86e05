#include "chebyaam/toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "chebyaam/io.hpp"
#include "chebyaam/numeric.hpp"
#include "chebyaam/rng.hpp"

namespace chebyaam {

namespace {

void normalize(std::span<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

void fill_unit_gaussian(Rng& rng, std::span<double> v) {
    do {
        for (double& x : v) x = rng.normal();
    } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
    normalize(v);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double accuracy(const Matrix& weights, const SphereDataset& data) {
    if (data.labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.points.rows(); ++i) {
        std::size_t best = 0;
        double best_cos = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < weights.rows(); ++c) {
            const double v = dot(weights.row(c), data.points.row(i));
            if (v > best_cos) {
                best_cos = v;
                best = c;
            }
        }
        if (static_cast<int>(best) == data.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.labels.size());
}

constexpr std::uint64_t kWeightStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kShuffleStream = 0xc2b2ae3d27d4eb4fULL;

}  // namespace

void TrainConfig::validate() const {
    loss.validate();
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(peak_lr > 0.0)) throw std::invalid_argument("peak_lr must be > 0");
    if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
        throw std::invalid_argument("warmup_fraction must lie in (0, 1)");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
    if (dim < 2) throw std::invalid_argument("dim must be >= 2");
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (samples_per_class < 1) throw std::invalid_argument("samples_per_class must be >= 1");
    if (!(spread >= 0.0)) throw std::invalid_argument("spread must be >= 0");
}

SphereDataset make_sphere_clusters(const TrainConfig& config) {
    if (config.dim < 2) throw std::invalid_argument("dim must be >= 2");
    if (config.num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (config.samples_per_class < 1) throw std::invalid_argument("samples_per_class must be >= 1");

    const auto dim = static_cast<std::size_t>(config.dim);
    const auto classes = static_cast<std::size_t>(config.num_classes);
    const auto per_class = static_cast<std::size_t>(config.samples_per_class);

    Rng rng(config.seed);
    Matrix prototypes(classes, dim);
    for (std::size_t c = 0; c < classes; ++c) fill_unit_gaussian(rng, prototypes.row(c));

    SphereDataset data;
    data.points = Matrix(classes * per_class, dim);
    data.labels.reserve(classes * per_class);
    data.num_classes = config.num_classes;
    data.seed = config.seed;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            auto row = data.points.row(c * per_class + i);
            const auto proto = prototypes.row(c);
            for (std::size_t d = 0; d < dim; ++d) row[d] = proto[d] + config.spread * rng.normal();
            if (config.spread > 0.0) normalize(row);
            data.labels.push_back(static_cast<int>(c));
        }
    }
    return data;
}

double warmup_cosine_lr(std::size_t step, std::size_t total_steps, double peak, double warmup_fraction) {
    if (step >= total_steps) throw std::out_of_range("learning-rate step out of range");
    const auto warmup = static_cast<std::size_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
    if (step < warmup) return peak * static_cast<double>(step) / static_cast<double>(warmup);
    const double progress =
        static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup);
    return 0.5 * peak * (1.0 + std::cos(std::numbers::pi * progress));
}

TrainTelemetry train(const TrainConfig& config) { return train(config, make_sphere_clusters(config)); }

TrainTelemetry train(const TrainConfig& config, const SphereDataset& data) {
    config.validate();
    const auto dim = data.points.cols();
    const auto classes = static_cast<std::size_t>(data.num_classes);
    const auto samples = data.points.rows();
    const auto batch = static_cast<std::size_t>(config.batch_size);

    Rng weight_rng(config.seed ^ kWeightStream);
    Matrix weights(classes, dim);
    for (std::size_t c = 0; c < classes; ++c) fill_unit_gaussian(weight_rng, weights.row(c));
    Matrix velocity(classes, dim);

    TrainTelemetry telemetry;
    telemetry.steps_per_epoch = (samples + batch - 1) / batch;
    const std::size_t total_steps = telemetry.steps_per_epoch * static_cast<std::size_t>(config.epochs);
    telemetry.records.reserve(total_steps);

    const TargetTransform transform(config.loss);
    Rng shuffle_rng(config.seed ^ kShuffleStream);
    std::vector<std::size_t> order(samples);
    Matrix grad_w(classes, dim);

    std::size_t step = 0;
    for (int epoch = 0; epoch < config.epochs && !telemetry.nan_seen; ++epoch) {
        for (std::size_t i = 0; i < samples; ++i) order[i] = i;
        for (std::size_t i = samples; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

        for (std::size_t start = 0; start < samples; start += batch, ++step) {
            const std::size_t rows = std::min(batch, samples - start);
            StepRecord rec;
            rec.step = step;
            rec.lr = warmup_cosine_lr(step, total_steps, config.peak_lr, config.warmup_fraction);

            Matrix cosines(rows, classes);
            std::vector<int> labels(rows);
            bool finite = true;
            rec.max_target_cosine = -1.0;
            for (std::size_t r = 0; r < rows; ++r) {
                const auto x = data.points.row(order[start + r]);
                labels[r] = data.labels[order[start + r]];
                for (std::size_t c = 0; c < classes; ++c) {
                    const double v = dot(weights.row(c), x);
                    finite = finite && std::isfinite(v);
                    cosines(r, c) = std::clamp(v, -1.0, 1.0);
                }
                rec.max_target_cosine = std::max(rec.max_target_cosine,
                                                 cosines(r, static_cast<std::size_t>(labels[r])));
            }
            if (!finite) {
                rec.mean_loss = rec.grad_norm = std::numeric_limits<double>::quiet_NaN();
                telemetry.records.push_back(rec);
                telemetry.nan_seen = true;
                break;
            }

            const LossOutput out = loss_forward(transform, CosineBatch(std::move(cosines), labels));
            rec.mean_loss = out.mean_loss;

            std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
            for (std::size_t r = 0; r < rows; ++r) {
                const auto x = data.points.row(order[start + r]);
                const auto g = out.grad_cosines.row(r);
                for (std::size_t c = 0; c < classes; ++c) {
                    if (g[c] == 0.0) continue;
                    auto gw = grad_w.row(c);
                    for (std::size_t d = 0; d < dim; ++d) gw[d] += g[c] * x[d];
                }
                const double target = std::abs(g[static_cast<std::size_t>(labels[r])]) * static_cast<double>(rows);
                rec.max_target_grad = std::max(rec.max_target_grad, target);
            }
            double sq = 0.0;
            for (double v : grad_w.data()) sq += v * v;
            rec.grad_norm = std::sqrt(sq);
            telemetry.records.push_back(rec);

            if (!std::isfinite(rec.mean_loss) || !std::isfinite(rec.grad_norm)) {
                telemetry.nan_seen = true;
                break;
            }
            telemetry.grad_norm_max = std::max(telemetry.grad_norm_max, rec.grad_norm);

            auto w = weights.data();
            auto v = velocity.data();
            const auto gw = grad_w.data();
            for (std::size_t k = 0; k < w.size(); ++k) {
                v[k] = config.momentum * v[k] + gw[k];
                w[k] -= rec.lr * v[k];
            }
            for (std::size_t c = 0; c < classes; ++c) normalize(weights.row(c));
        }
    }

    telemetry.final_accuracy = accuracy(weights, data);
    telemetry.weights = std::move(weights);
    return telemetry;
}

InstabilityFlags detect_instability(const TrainTelemetry& telemetry, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("instability threshold must be > 0");
    InstabilityFlags flags;
    flags.nan_seen = telemetry.nan_seen;
    for (const auto& rec : telemetry.records) {
        const bool bad_value = !std::isfinite(rec.grad_norm) || !std::isfinite(rec.mean_loss);
        const bool too_large = rec.grad_norm > threshold;
        if (bad_value) flags.nan_seen = true;
        if (too_large) flags.threshold_exceeded = true;
        if ((bad_value || too_large) && !flags.first_offending_step) flags.first_offending_step = rec.step;
    }
    return flags;
}

std::string telemetry_csv(const TrainTelemetry& telemetry) {
    std::ostringstream out;
    out << "step,lr,mean_loss,grad_norm,max_target_cosine\n";
    for (const auto& r : telemetry.records) {
        out << r.step << ',' << format_shortest(r.lr) << ',' << format_shortest(r.mean_loss) << ','
            << format_shortest(r.grad_norm) << ',' << format_shortest(r.max_target_cosine) << '\n';
    }
    return out.str();
}

std::string telemetry_summary(const TrainConfig& config, const TrainTelemetry& telemetry) {
    std::ostringstream out;
    out << "loss=" << loss_name(config.loss.kind) << '\n'
        << "margin=" << format_shortest(config.loss.margin) << '\n'
        << "scale=" << format_shortest(config.loss.scale) << '\n'
        << "degree=" << config.loss.degree << '\n'
        << "seed=" << config.seed << '\n'
        << "epochs=" << config.epochs << '\n'
        << "steps=" << telemetry.records.size() << '\n'
        << "final_accuracy=" << format_shortest(telemetry.final_accuracy) << '\n'
        << "nan_seen=" << (telemetry.nan_seen ? "true" : "false") << '\n'
        << "grad_norm_max=" << format_shortest(telemetry.grad_norm_max) << '\n';
    return out.str();
}

void write_telemetry(const TrainConfig& config, const TrainTelemetry& telemetry,
                     const std::filesystem::path& csv_path, const std::filesystem::path& summary_path) {
    write_file_atomically(csv_path, telemetry_csv(telemetry));
    write_file_atomically(summary_path, telemetry_summary(config, telemetry));
}

}  // namespace chebyaam
