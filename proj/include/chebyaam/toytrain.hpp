#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chebyaam/margin_losses.hpp"
#include "chebyaam/matrix.hpp"

namespace chebyaam {

/// Desk-scale training setup: a cosine classifier (unit-norm weight rows)
/// over synthetic clusters on the unit hypersphere.
struct TrainConfig {
    LossSpec loss = LossSpec::cheby_aam();
    int epochs = 30;
    int batch_size = 64;
    double peak_lr = 0.2;
    double warmup_fraction = 0.1;
    double momentum = 0.0;
    std::uint64_t seed = 42;
    int dim = 32;
    int num_classes = 16;
    int samples_per_class = 200;
    /// Per-coordinate standard deviation of the Gaussian noise added to each
    /// class prototype before renormalisation.
    double spread = 0.1;

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

struct SphereDataset {
    Matrix points;  // samples x dim, unit rows
    std::vector<int> labels;
    int num_classes = 0;
    std::uint64_t seed = 0;
};

/// Seeded unit prototypes plus Gaussian noise, renormalised. Samples are laid
/// out class by class. Throws std::invalid_argument if dim < 2 or
/// num_classes < 2.
SphereDataset make_sphere_clusters(const TrainConfig& config);

/// Linear warmup from 0 to peak over round(warmup_fraction * total) steps,
/// then half-cosine decay to 0 at total_steps.
double warmup_cosine_lr(std::size_t step, std::size_t total_steps, double peak, double warmup_fraction);

struct StepRecord {
    std::size_t step = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
    /// Frobenius norm of the weight gradient.
    double grad_norm = 0.0;
    double max_target_cosine = 0.0;
    /// max_i |d loss_i / d cos(target)| in the batch (per-sample loss).
    double max_target_grad = 0.0;
};

struct TrainTelemetry {
    std::vector<StepRecord> records;
    double final_accuracy = 0.0;
    bool nan_seen = false;
    double grad_norm_max = 0.0;
    std::size_t steps_per_epoch = 0;
    /// Classifier weights after the last step, one unit row per class.
    Matrix weights;
};

/// Plain SGD on loss_forward gradients with rows renormalised after each
/// update. Halts at the first non-finite loss or gradient and sets nan_seen.
TrainTelemetry train(const TrainConfig& config);
TrainTelemetry train(const TrainConfig& config, const SphereDataset& data);

struct InstabilityFlags {
    bool threshold_exceeded = false;
    bool nan_seen = false;
    std::optional<std::size_t> first_offending_step;
};

/// Throws std::invalid_argument if threshold <= 0.
InstabilityFlags detect_instability(const TrainTelemetry& telemetry, double threshold);

/// `step,lr,mean_loss,grad_norm,max_target_cosine`, one row per step.
std::string telemetry_csv(const TrainTelemetry& telemetry);
/// key=value lines summarising the run.
std::string telemetry_summary(const TrainConfig& config, const TrainTelemetry& telemetry);

void write_telemetry(const TrainConfig& config, const TrainTelemetry& telemetry,
                     const std::filesystem::path& csv_path, const std::filesystem::path& summary_path);

}  // namespace chebyaam
