// Acceptance suite: one PASS/FAIL line per criterion, each with its own
// wall-clock limit. With a path argument the report is also written there.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chebyaam/cheby_core.hpp"
#include "chebyaam/io.hpp"
#include "chebyaam/landscape.hpp"
#include "chebyaam/margin_losses.hpp"
#include "chebyaam/numcheck.hpp"
#include "chebyaam/toytrain.hpp"
#include "chebyaam/verif_metrics.hpp"
#include "oracles.hpp"

using namespace chebyaam;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;
std::ostringstream report;

void emit(const std::string& line) {
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    report << line;
}

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < limit_seconds;
    const bool pass = out.ok && in_time;
    if (!pass) ++failures;
    emit(std::string("[") + (pass ? "PASS" : "FAIL") + "] " + std::to_string(id) + " " + title + ": " + out.detail +
         "; runtime " + fmt("%.3g", seconds) + " s (limit " + fmt("%g", limit_seconds) + " s" +
         (in_time ? "" : ", exceeded") + ")\n");
}

Outcome published_coefficients() {
    const auto s = coefficients(0.2, 30);
    const double expected[] = {-0.1265, 0.98007, 0.08433, 0.0, 0.01687};
    Outcome out;
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k) worst = std::max(worst, std::abs(s[k] - expected[k]));
    out.ok = worst <= 5e-4;
    out.detail = "max |a_k - published| over k<=4 = " + fmt("%.3g", worst) + " (tol 5e-4)";
    return out;
}

Outcome approximation_bound() {
    // The bound is attained at x = +-1; allow the rounding of that equality.
    const double slack = 4 * std::numeric_limits<double>::epsilon();
    Outcome out;
    int within = 0, total = 0;
    double worst_excess = -1.0;
    int decays = 0;
    for (double m : {0.1, 0.2, 0.3, 0.5}) {
        double e2 = 0.0, e30 = 0.0;
        for (int d : {2, 5, 10, 20, 30, 40, 50}) {
            const double e = numcheck::max_abs_error(m, d, 100000);
            const double b = approx_error_bound(m, d);
            worst_excess = std::max(worst_excess, e - b);
            ++total;
            if (e <= b + slack) ++within;
            if (d == 2) e2 = e;
            if (d == 30) e30 = e;
        }
        if (e30 < e2) ++decays;
    }
    out.ok = within == total && decays == 4;
    out.detail = std::to_string(within) + "/" + std::to_string(total) + " (m, degree) pairs within bound, max(err - bound) = " +
                 fmt("%.3g", worst_excess) + "; degree 30 < degree 2 for " + std::to_string(decays) + "/4 margins";
    return out;
}

Outcome gradient_correctness() {
    const std::vector<LossSpec> specs{LossSpec::n_softmax(), LossSpec::a_softmax(), LossSpec::am_softmax(),
                                      LossSpec::aam_softmax(), LossSpec::cheby_aam()};
    std::vector<double> worst(specs.size(), 0.0);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto batch = random_cosine_batch(8, 16, seed, 0.95);
        for (std::size_t k = 0; k < specs.size(); ++k) {
            worst[k] = std::max(worst[k], loss_grad_check(specs[k], batch, 1e-5).max_rel_error);
        }
    }
    bool losses_ok = true;
    std::string detail = "loss max rel err";
    for (std::size_t k = 0; k < specs.size(); ++k) {
        losses_ok = losses_ok && worst[k] <= 1e-5;
        detail += " " + std::string(loss_name(specs[k].kind)) + "=" + fmt("%.2g", worst[k]);
    }

    struct SeriesFd {
        double d1 = 0.0;
        double d2 = 0.0;
    };
    const auto series_fd = [](double m, double step) {
        const auto s = coefficients(m, kDefaultDegree);
        const auto f = [&](double x) { return clenshaw_eval(s, x); };
        const auto g = [&](double x) { return series_derivative(s, x); };
        SeriesFd worst;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -0.99 + i * (1.98 / 2000);
            const double d1 = series_derivative(s, x);
            const double d2 = series_hessian(s, x);
            worst.d1 = std::max(worst.d1, std::abs(d1 - numcheck::finite_diff_grad(f, x, step)) /
                                              std::max(std::abs(d1), kGradCheckFloor));
            worst.d2 = std::max(worst.d2, std::abs(d2 - numcheck::finite_diff_grad(g, x, step)) /
                                              std::max(std::abs(d2), kGradCheckFloor));
        }
        return worst;
    };
    const SeriesFd at_default = series_fd(kDefaultMargin, 1e-5);
    const double d1_worst = at_default.d1;
    const double d2_worst = at_default.d2;
    for (double m : {0.1, 0.2, 0.5}) {
        const SeriesFd coarse = series_fd(m, 1e-5);
        const SeriesFd fine = series_fd(m, 1e-6);
        emit("[INFO] 3 m=" + fmt("%g", m) + " degree 30: series FD rel err d1 " + fmt("%.2g", coarse.d1) + " d2 " +
             fmt("%.2g", coarse.d2) + " at step 1e-5; d1 " + fmt("%.2g", fine.d1) + " d2 " + fmt("%.2g", fine.d2) +
             " at step 1e-6\n");
    }
    Outcome out;
    out.ok = losses_ok && d1_worst <= 1e-6 && d2_worst <= 1e-5;
    out.detail = detail + " (tol 1e-5, 100 batches 8x16); series d1 rel err " + fmt("%.2g", d1_worst) +
                 " (tol 1e-6), d2 rel err " + fmt("%.2g", d2_worst) +
                 " (tol 1e-5), m=0.3 degree 30, step 1e-5 on [-0.99, 0.99]";
    return out;
}

Outcome bounded_vs_exploding() {
    const auto s = coefficients(0.3, 30);
    const double lip = lipschitz_constant(s);
    const double near = exact_psi_derivative(1.0 - 1e-6, 0.3);
    const double nearer = exact_psi_derivative(1.0 - 1e-10, 0.3);
    const double c_near = series_derivative(s, 1.0 - 1e-6);
    const double c_nearer = series_derivative(s, 1.0 - 1e-10);
    const double change = std::abs(c_nearer - c_near) / std::abs(c_near);
    Outcome out;
    out.ok = lip < 10.0 && near > 100.0 && nearer >= 10.0 * near && change < 0.01;
    out.detail = "L = " + fmt("%.6g", lip) + "; exact psi' at 1-1e-6 = " + fmt("%.6g", near) + ", at 1-1e-10 = " +
                 fmt("%.6g", nearer) + " (x" + fmt("%.4g", nearer / near) + "); series change " +
                 fmt("%.3g", 100.0 * change) + "%";
    return out;
}

Outcome gradient_gap() {
    Outcome out;
    const auto cheb = derivative_gap(LossSpec::cheby_aam(0.3, 30, kDefaultScale));
    const auto aam = derivative_gap(LossSpec::aam_softmax(0.3, kDefaultScale));
    out.ok = cheb.ratio > aam.ratio;
    out.detail = "s=32 ratio chebyaam=" + fmt("%.9g", cheb.ratio) + " aamsoftmax=" + fmt("%.9g", aam.ratio) + "; sweep";
    for (double s : {1.0, 30.0, 32.0, 64.0}) {
        const auto c = derivative_gap(LossSpec::cheby_aam(0.3, 30, s));
        const auto a = derivative_gap(LossSpec::aam_softmax(0.3, s));
        out.detail += " s=" + fmt("%g", s) + ":" + fmt("%.6g", c.ratio) + (c.ratio > a.ratio ? ">" : "<=") +
                      fmt("%.6g", a.ratio);
    }
    return out;
}

Outcome stability_run() {
    TrainConfig config;
    config.num_classes = 16;
    config.dim = 32;
    config.samples_per_class = 200;
    config.epochs = 30;
    const auto data = make_sphere_clusters(config);
    config.loss = LossSpec::cheby_aam(0.5, kDefaultDegree);
    const auto cheb = train(config, data);
    config.loss = LossSpec::aam_softmax(0.5);
    const auto aam = train(config, data);
    Outcome out;
    out.ok = !cheb.nan_seen && cheb.final_accuracy >= 0.95 && cheb.grad_norm_max <= aam.grad_norm_max;
    out.detail = "seed " + std::to_string(config.seed) + ": chebyaam nan_seen=" + (cheb.nan_seen ? "true" : "false") +
                 " accuracy=" + fmt("%.4g", cheb.final_accuracy) + " grad_norm_max=" + fmt("%.6g", cheb.grad_norm_max) +
                 " vs aamsoftmax " + fmt("%.6g", aam.grad_norm_max);
    return out;
}

void stability_seed_sweep() {
    int holds = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TrainConfig config;
        config.seed = seed;
        const auto data = make_sphere_clusters(config);
        config.loss = LossSpec::cheby_aam(0.5, kDefaultDegree);
        const double c = train(config, data).grad_norm_max;
        config.loss = LossSpec::aam_softmax(0.5);
        const double a = train(config, data).grad_norm_max;
        ++total;
        if (c <= a) ++holds;
    }
    emit("[INFO] 6 seed sweep 1..20: grad_norm_max(chebyaam) <= grad_norm_max(aamsoftmax) in " +
         std::to_string(holds) + "/" + std::to_string(total) + " runs\n");
}

std::vector<TrialScore> random_trials(std::mt19937_64& gen) {
    std::uniform_int_distribution<int> size(2, 50);
    std::uniform_int_distribution<int> level(0, 15);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = size(gen);
    const bool lattice = coin(gen);
    std::vector<TrialScore> out;
    for (int i = 0; i < n; ++i) {
        const bool target = i == 0 ? true : (i == 1 ? false : coin(gen));
        const double s = lattice ? level(gen) / 8.0 + (target ? 0.25 : 0.0) : noise(gen) + (target ? 1.0 : 0.0);
        out.push_back({"e", "t" + std::to_string(i), s, target});
    }
    return out;
}

Outcome metric_oracle() {
    std::mt19937_64 gen(20240);
    double eer_worst = 0.0, dcf_worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto trials = random_trials(gen);
        eer_worst = std::max(eer_worst, std::abs(compute_eer(trials).eer - oracle::brute_force_eer(trials)));
        dcf_worst = std::max(dcf_worst, std::abs(compute_min_dcf(trials) - oracle::brute_force_min_dcf(trials, 0.01)));
    }
    std::vector<TrialScore> perfect, constant;
    for (int i = 0; i < 20; ++i) {
        perfect.push_back({"e", "t" + std::to_string(i), i < 10 ? 0.5 + i / 40.0 : -0.5 + i / 40.0, i < 10});
        constant.push_back({"e", "t" + std::to_string(i), 0.3, i % 3 == 0});
    }
    const double p_eer = compute_eer(perfect).eer;
    const double p_dcf = compute_min_dcf(perfect);
    const double c_dcf = compute_min_dcf(constant);
    Outcome out;
    out.ok = eer_worst <= 1e-12 && dcf_worst <= 1e-12 && p_eer == 0.0 && p_dcf == 0.0 && c_dcf == 1.0;
    out.detail = "1000 sets: max |EER - oracle| = " + fmt("%.2g", eer_worst) + ", max |minDCF - oracle| = " +
                 fmt("%.2g", dcf_worst) + "; perfect EER=" + fmt("%g", p_eer) + " minDCF=" + fmt("%g", p_dcf) +
                 "; label-independent minDCF=" + fmt("%g", c_dcf);
    return out;
}

Outcome clenshaw_equivalence() {
    double worst = 0.0;
    std::size_t count = 0;
    for (double m : {0.1, 0.2, 0.3, 0.5}) {
        for (int d : {2, 5, 10, 20, 30, 40, 50}) {
            const auto s = coefficients(m, d);
            for (int i = 0; i <= 2000; ++i) {
                const double x = -1.0 + i / 1000.0;
                worst = std::max(worst, std::abs(clenshaw_eval(s, x) - oracle::naive_series(s.coefficients(), x)));
                ++count;
            }
        }
    }
    Outcome out;
    out.ok = worst <= 1e-12;
    out.detail = std::to_string(count) + " (m, degree, x) points, max |clenshaw - naive| = " + fmt("%.2g", worst);
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = "'" CHEBYAAM_CLI_PATH "' " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "chebyaam_acceptance";
    std::filesystem::remove_all(root);
    Outcome out;
    std::vector<std::string> compared;
    bool same = true;
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"train --loss chebyaam --seed 7 --out ", {"telemetry.csv", "summary.txt"}},
        {"train --loss aamsoftmax --margin 0.5 --out ", {"telemetry.csv", "summary.txt"}},
        {"landscape --out ", {"curves.csv", "surfaces.csv"}},
    };
    for (std::size_t k = 0; k < commands.size(); ++k) {
        const auto a = root / ("run" + std::to_string(k) + "a");
        const auto b = root / ("run" + std::to_string(k) + "b");
        if (run_cli(commands[k].first + "'" + a.string() + "'") != 0 ||
            run_cli(commands[k].first + "'" + b.string() + "'") != 0) {
            return {false, "command failed: " + commands[k].first};
        }
        for (const auto& f : commands[k].second) {
            const bool eq = read_file(a / f) == read_file(b / f);
            same = same && eq;
            compared.push_back(f + (eq ? "" : " (differs)"));
        }
    }
    std::filesystem::remove_all(root);
    out.ok = same;
    out.detail = std::to_string(compared.size()) + " file pairs byte-identical:";
    for (const auto& c : compared) out.detail += " " + c;
    if (!same) out.detail = "mismatch:" + out.detail;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    criterion(1, "coefficient reproduction at m=0.2", 1e-3, published_coefficients);
    criterion(2, "approximation bound", 5.0, approximation_bound);
    criterion(3, "gradient correctness", 10.0, gradient_correctness);
    criterion(4, "bounded vs exploding derivative", 1.0, bounded_vs_exploding);
    criterion(5, "hard/easy gradient gap", 1.0, gradient_gap);
    criterion(6, "desk-scale stability run (m=0.5)", 120.0, stability_run);
    stability_seed_sweep();
    criterion(7, "metric oracle equivalence", 10.0, metric_oracle);
    criterion(8, "Clenshaw equivalence", 1.0, clenshaw_equivalence);
    criterion(9, "determinism of train and landscape", 120.0, determinism);
    emit(std::to_string(failures) + " of 9 criteria failed\n");
    if (argc > 1) {
        try {
            write_file_atomically(argv[1], report.str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "acceptance: %s\n", e.what());
            return 1;
        }
    }
    return failures == 0 ? 0 : 1;
}
