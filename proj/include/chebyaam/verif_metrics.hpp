#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebyaam {

struct TrialScore {
    std::string enroll_id;
    std::string test_id;
    double score = 0.0;
    bool is_target = false;
};

struct DcfParams {
    double p_target = 0.01;
    double c_miss = 1.0;
    double c_fa = 1.0;

    void validate() const;
};

/// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws std::invalid_argument on
/// dimension mismatch or a zero-norm input.
double cosine_score(std::span<const double> a, std::span<const double> b);

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

/// Equal error rate over the operating points of a sorted-score sweep (equal
/// scores form one point), linearly interpolated at the sign change of
/// FAR - FRR. A trial is accepted when its score exceeds the threshold.
/// Throws std::invalid_argument unless both classes are present and all
/// scores are finite.
EerResult compute_eer(std::span<const TrialScore> scores);

/// min_t [c_miss p FRR(t) + c_fa (1-p) FAR(t)] / min(c_miss p, c_fa (1-p)).
double compute_min_dcf(std::span<const TrialScore> scores, const DcfParams& params = {});

class TrialFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Joins a trial list (`label enroll test`, label 0/1) with a score file
/// (`enroll test score`) on the id pair, preserving trial order. Blank lines
/// are skipped. Throws TrialFormatError with file:line on malformed input,
/// duplicate score pairs, or trials without a score.
std::vector<TrialScore> parse_trials(const std::filesystem::path& trial_file,
                                     const std::filesystem::path& scores_file);

}  // namespace chebyaam
