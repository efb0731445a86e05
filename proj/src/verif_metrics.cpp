#include "chebyaam/verif_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace chebyaam {

namespace {

// Operating points of the sweep "accept iff score > t". Point 0 accepts all;
// point i rejects every score <= the i-th distinct value.
struct Sweep {
    std::vector<double> frr;
    std::vector<double> far;
    std::vector<double> threshold;
};

Sweep sweep(std::span<const TrialScore> scores) {
    std::size_t targets = 0;
    for (const auto& t : scores) {
        if (!std::isfinite(t.score)) throw std::invalid_argument("non-finite trial score");
        if (t.is_target) ++targets;
    }
    const std::size_t nontargets = scores.size() - targets;
    if (targets == 0 || nontargets == 0) {
        throw std::invalid_argument("need at least one target and one nontarget trial");
    }

    std::vector<std::pair<double, bool>> sorted;
    sorted.reserve(scores.size());
    for (const auto& t : scores) sorted.emplace_back(t.score, t.is_target);
    std::sort(sorted.begin(), sorted.end());

    Sweep s;
    s.frr.push_back(0.0);
    s.far.push_back(1.0);
    s.threshold.push_back(sorted.front().first);
    std::size_t misses = 0, rejected_nontargets = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double v = sorted[i].first;
        for (; i < sorted.size() && sorted[i].first == v; ++i) {
            if (sorted[i].second) ++misses; else ++rejected_nontargets;
        }
        s.frr.push_back(static_cast<double>(misses) / static_cast<double>(targets));
        s.far.push_back(static_cast<double>(nontargets - rejected_nontargets) / static_cast<double>(nontargets));
        s.threshold.push_back(v);
    }
    return s;
}

}  // namespace

void DcfParams::validate() const {
    if (!(p_target > 0.0 && p_target < 1.0)) throw std::invalid_argument("p_target must lie in (0, 1)");
    if (!(c_miss > 0.0) || !(c_fa > 0.0)) throw std::invalid_argument("DCF costs must be positive");
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_score: dimension mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("cosine_score: zero-norm vector");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

EerResult compute_eer(std::span<const TrialScore> scores) {
    const Sweep s = sweep(scores);
    for (std::size_t i = 0; i < s.frr.size(); ++i) {
        const double d = s.far[i] - s.frr[i];
        if (d > 0.0) continue;
        if (d == 0.0) return {s.far[i], s.threshold[i]};
        // FAR - FRR is 1 at point 0, so i >= 1 here.
        const double d0 = s.far[i - 1] - s.frr[i - 1];
        const double alpha = d0 / (d0 - d);
        const double eer = s.frr[i - 1] + alpha * (s.frr[i] - s.frr[i - 1]);
        const double thr = s.threshold[i - 1] + alpha * (s.threshold[i] - s.threshold[i - 1]);
        return {eer, thr};
    }
    // Unreachable: the last point has FAR = 0, FRR = 1.
    return {1.0, s.threshold.back()};
}

double compute_min_dcf(std::span<const TrialScore> scores, const DcfParams& params) {
    params.validate();
    const Sweep s = sweep(scores);
    const double w_miss = params.c_miss * params.p_target;
    const double w_fa = params.c_fa * (1.0 - params.p_target);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.frr.size(); ++i) best = std::min(best, w_miss * s.frr[i] + w_fa * s.far[i]);
    return best / std::min(w_miss, w_fa);
}

std::vector<TrialScore> parse_trials(const std::filesystem::path& trial_file,
                                     const std::filesystem::path& scores_file) {
    auto open = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw TrialFormatError("cannot open " + p.string());
        return in;
    };
    auto where = [](const std::filesystem::path& p, std::size_t line) {
        return p.string() + ":" + std::to_string(line) + ": ";
    };

    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> by_pair;
    {
        auto in = open(scores_file);
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            std::istringstream ls(line);
            std::string enroll, test, score_text, extra;
            if (!(ls >> enroll)) continue;
            if (!(ls >> test >> score_text) || (ls >> extra)) {
                throw TrialFormatError(where(scores_file, n) + "expected `enroll_id test_id score`");
            }
            std::size_t used = 0;
            double score = 0.0;
            try {
                score = std::stod(score_text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != score_text.size() || !std::isfinite(score)) {
                throw TrialFormatError(where(scores_file, n) + "invalid score `" + score_text + "`");
            }
            auto [it, fresh] = by_pair.try_emplace({enroll, test}, score, n);
            if (!fresh) {
                throw TrialFormatError(where(scores_file, n) + "duplicate score for pair (" + enroll + ", " + test +
                                       "), first given on line " + std::to_string(it->second.second));
            }
        }
    }

    std::vector<TrialScore> trials;
    auto in = open(trial_file);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        std::istringstream ls(line);
        std::string label, enroll, test, extra;
        if (!(ls >> label)) continue;
        if (!(ls >> enroll >> test) || (ls >> extra)) {
            throw TrialFormatError(where(trial_file, n) + "expected `label enroll_id test_id`");
        }
        if (label != "0" && label != "1") {
            throw TrialFormatError(where(trial_file, n) + "label must be 0 or 1, got `" + label + "`");
        }
        const auto it = by_pair.find({enroll, test});
        if (it == by_pair.end()) {
            throw TrialFormatError(where(trial_file, n) + "no score for pair (" + enroll + ", " + test + ")");
        }
        trials.push_back({enroll, test, it->second.first, label == "1"});
    }
    return trials;
}

}  // namespace chebyaam
