// chebyaam: command-line front end for the Chebyshev margin-loss toolkit.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chebyaam/cheby_core.hpp"
#include "chebyaam/io.hpp"
#include "chebyaam/landscape.hpp"
#include "chebyaam/margin_losses.hpp"
#include "chebyaam/numcheck.hpp"
#include "chebyaam/numeric.hpp"
#include "chebyaam/toytrain.hpp"
#include "chebyaam/verif_metrics.hpp"

namespace fs = std::filesystem;
using namespace chebyaam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr const char* kSeedEnv = "CHEBYAAM_SEED";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// `key=value` lines, `#` comments, blank lines ignored.
std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(n) + ": expected key=value");
        }
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

// Fills options not given on the command line (or via environment) from the
// config file. Unknown keys are rejected like unknown flags.
void apply_config(CLI::App& sub, const std::string& config_path) {
    if (config_path.empty()) return;
    for (const auto& [key, value] : read_config_file(config_path)) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("unknown key in config file: " + key);
        }
        if (opt->count() > 0 || key == "config") continue;
        opt->clear();
        std::stringstream parts(value);
        std::string part;
        while (std::getline(parts, part, ',')) opt->add_result(part);
        opt->run_callback();
    }
}

void print_resolved(const CLI::App& sub) {
    std::cerr << "# " << sub.get_name() << '\n';
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        std::cerr << "#   " << name << '=' << value << '\n';
    }
}

LossSpec build_loss(const std::string& loss_name, std::optional<double> margin, int degree, double scale) {
    const auto kind = parse_loss_kind(loss_name);
    if (!kind) throw UsageError("unknown loss `" + loss_name + "`");
    LossSpec spec{*kind, margin.value_or(default_margin(*kind)), scale, degree};
    spec.validate();
    return spec;
}

const std::vector<std::string> kLossChoices{"nsoftmax", "asoftmax", "amsoftmax", "aamsoftmax", "chebyaam"};

struct Common {
    std::string config;
};

CLI::App* add_subcommand(CLI::App& app, const std::string& name, const std::string& description, Common& common) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", common.config, "key=value file; command-line flags take precedence");
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev angular-margin loss toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    Common common;

    // coeffs
    double c_margin = kDefaultMargin;
    int c_degree = kDefaultDegree;
    auto* coeffs = add_subcommand(app, "coeffs", "Print the Chebyshev coefficients a_k as CSV", common);
    coeffs->add_option("--margin", c_margin, "Angular margin m (radians)");
    coeffs->add_option("--degree", c_degree, "Highest coefficient index");

    // eval-psi
    double e_margin = kDefaultMargin;
    int e_degree = kDefaultDegree;
    std::vector<double> e_x{0.5};
    auto* eval = add_subcommand(app, "eval-psi", "Evaluate exact psi and its truncated series at points", common);
    eval->add_option("--margin", e_margin, "Angular margin m (radians)");
    eval->add_option("--degree", e_degree, "Series degree");
    eval->add_option("--x", e_x, "Evaluation points in [-1, 1]")->delimiter(',');

    // gradcheck
    std::string g_loss = "chebyaam";
    std::optional<double> g_margin;
    int g_degree = kDefaultDegree;
    double g_scale = kDefaultScale;
    std::uint64_t g_seed = 42;
    std::size_t g_rows = 8, g_classes = 16;
    double g_step = numcheck::kFirstDerivativeStep, g_tol = 1e-5;
    auto* gradcheck = add_subcommand(app, "gradcheck", "Compare analytic loss gradients with finite differences", common);
    gradcheck->add_option("--loss", g_loss, "Loss kind")->check(CLI::IsMember(kLossChoices));
    gradcheck->add_option("--margin", g_margin, "Margin (auto: 2 asoftmax, 0.2 amsoftmax, 0.3 otherwise)")
        ->default_str("auto");
    gradcheck->add_option("--degree", g_degree, "ChebyAAM series degree");
    gradcheck->add_option("--scale", g_scale, "Logit scale s");
    gradcheck->add_option("--seed", g_seed, "Batch seed")->envname(kSeedEnv);
    gradcheck->add_option("--batch", g_rows, "Batch rows");
    gradcheck->add_option("--classes", g_classes, "Classes per row");
    gradcheck->add_option("--step", g_step, "Central-difference step");
    gradcheck->add_option("--tol", g_tol, "Maximum accepted relative error");

    // lipschitz
    double l_margin = kDefaultMargin;
    std::vector<int> l_degrees{kDefaultDegree};
    std::size_t l_grid = 100001;
    auto* lipschitz = add_subcommand(app, "lipschitz", "Lipschitz constant and sup error per degree", common);
    lipschitz->add_option("--margin", l_margin, "Angular margin m (radians)");
    lipschitz->add_option("--degree", l_degrees, "Series degree(s)")->delimiter(',');
    lipschitz->add_option("--grid", l_grid, "Uniform grid points on [-1, 1]");

    // landscape
    double s_margin = kDefaultMargin;
    std::vector<int> s_degrees{2, kDefaultDegree};
    int s_surface_degree = kDefaultDegree;
    double s_scale = kDefaultScale;
    std::size_t s_grid = 201, s_curve_grid = 2001;
    std::string s_out;
    auto* landscape = add_subcommand(app, "landscape", "Export curve and derivative-surface CSVs", common);
    landscape->add_option("--margin", s_margin, "Angular margin m (radians)");
    landscape->add_option("--degree", s_degrees, "Series degrees for the curve export")->delimiter(',');
    landscape->add_option("--surface-degree", s_surface_degree, "ChebyAAM degree for the surface export");
    landscape->add_option("--scale", s_scale, "Logit scale s");
    landscape->add_option("--grid", s_grid, "Surface grid points per axis");
    landscape->add_option("--curve-grid", s_curve_grid, "Curve grid points");
    landscape->add_option("--out", s_out, "Output directory")->required();

    // train
    std::string t_loss = "chebyaam";
    std::optional<double> t_margin;
    TrainConfig t_cfg;
    std::string t_out;
    auto* train_cmd = add_subcommand(app, "train", "Train the toy cosine classifier and export telemetry", common);
    train_cmd->add_option("--loss", t_loss, "Loss kind")->check(CLI::IsMember(kLossChoices));
    train_cmd->add_option("--margin", t_margin, "Margin (auto: 2 asoftmax, 0.2 amsoftmax, 0.3 otherwise)")
        ->default_str("auto");
    train_cmd->add_option("--degree", t_cfg.loss.degree, "ChebyAAM series degree");
    train_cmd->add_option("--scale", t_cfg.loss.scale, "Logit scale s");
    train_cmd->add_option("--seed", t_cfg.seed, "Data, init and shuffle seed")->envname(kSeedEnv);
    train_cmd->add_option("--epochs", t_cfg.epochs, "Training epochs");
    train_cmd->add_option("--batch-size", t_cfg.batch_size, "Mini-batch size");
    train_cmd->add_option("--lr", t_cfg.peak_lr, "Peak learning rate");
    train_cmd->add_option("--warmup", t_cfg.warmup_fraction, "Warmup fraction of total steps");
    train_cmd->add_option("--momentum", t_cfg.momentum, "SGD momentum");
    train_cmd->add_option("--classes", t_cfg.num_classes, "Number of classes");
    train_cmd->add_option("--dim", t_cfg.dim, "Embedding dimension");
    train_cmd->add_option("--per-class", t_cfg.samples_per_class, "Samples per class");
    train_cmd->add_option("--spread", t_cfg.spread, "Per-coordinate noise std around each prototype");
    train_cmd->add_option("--out", t_out, "Output directory")->required();

    // score
    std::string v_trials, v_scores;
    DcfParams v_params;
    auto* score = add_subcommand(app, "score", "EER and minDCF from a trial list and a score file", common);
    score->add_option("--trials", v_trials, "Trial list: label enroll_id test_id")->required();
    score->add_option("--scores", v_scores, "Score file: enroll_id test_id score")->required();
    score->add_option("--p-target", v_params.p_target, "Target prior");
    score->add_option("--c-miss", v_params.c_miss, "Miss cost");
    score->add_option("--c-fa", v_params.c_fa, "False-alarm cost");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        apply_config(*sub, common.config);
        print_resolved(*sub);

        if (sub == coeffs) {
            const auto series = coefficients(c_margin, c_degree);
            std::cout << "k,a_k\n";
            for (int k = 0; k <= series.degree(); ++k) {
                std::cout << k << ',' << format_shortest(series[static_cast<std::size_t>(k)]) << '\n';
            }
        } else if (sub == eval) {
            const auto series = coefficients(e_margin, e_degree);
            std::cout << "x,psi,cheb,abs_error,psi_d1,cheb_d1,cheb_d2\n";
            for (double x : e_x) {
                const double psi = exact_psi(x, e_margin);
                const double cheb = clenshaw_eval(series, x);
                std::cout << format_shortest(x) << ',' << format_shortest(psi) << ',' << format_shortest(cheb) << ','
                          << format_shortest(std::abs(psi - cheb)) << ','
                          << format_shortest(exact_psi_derivative(x, e_margin)) << ','
                          << format_shortest(series_derivative(series, x)) << ','
                          << format_shortest(series_hessian(series, x)) << '\n';
            }
        } else if (sub == gradcheck) {
            const LossSpec spec = build_loss(g_loss, g_margin, g_degree, g_scale);
            const auto batch = random_cosine_batch(g_rows, g_classes, g_seed);
            const auto report = loss_grad_check(spec, batch, g_step);
            std::cout << "max_rel_error " << format_shortest(report.max_rel_error) << '\n'
                      << "max_target_grad " << format_shortest(report.max_target_grad) << '\n';
            if (!(report.max_rel_error <= g_tol)) {
                std::cerr << "gradient check failed: " << report.max_rel_error << " > tol " << g_tol << '\n';
                return kExitCheckFailed;
            }
        } else if (sub == lipschitz) {
            std::cout << "degree,lipschitz,max_abs_error,error_bound\n";
            for (int d : l_degrees) {
                const auto series = coefficients(l_margin, d);
                std::cout << d << ',' << format_shortest(lipschitz_constant(series, l_grid)) << ','
                          << format_shortest(numcheck::max_abs_error(l_margin, d, l_grid)) << ','
                          << format_shortest(approx_error_bound(l_margin, d)) << '\n';
            }
        } else if (sub == landscape) {
            fs::create_directories(s_out);
            export_curves(s_margin, s_degrees, s_curve_grid, fs::path(s_out) / "curves.csv");
            const std::vector<LossSpec> specs{LossSpec::n_softmax(s_scale), LossSpec::aam_softmax(s_margin, s_scale),
                                              LossSpec::cheby_aam(s_margin, s_surface_degree, s_scale)};
            export_surfaces(specs, s_grid, fs::path(s_out) / "surfaces.csv");
            std::cout << "loss,grad_A,grad_B,ratio\n";
            for (const auto& spec : specs) {
                const auto gap = derivative_gap(spec);
                std::cout << loss_name(spec.kind) << ',' << format_shortest(gap.grad_a) << ','
                          << format_shortest(gap.grad_b) << ',' << format_shortest(gap.ratio) << '\n';
            }
        } else if (sub == train_cmd) {
            const LossSpec spec = build_loss(t_loss, t_margin, t_cfg.loss.degree, t_cfg.loss.scale);
            t_cfg.loss = spec;
            t_cfg.validate();
            fs::create_directories(t_out);
            const auto telemetry = train(t_cfg);
            write_telemetry(t_cfg, telemetry, fs::path(t_out) / "telemetry.csv", fs::path(t_out) / "summary.txt");
            std::cout << telemetry_summary(t_cfg, telemetry);
        } else if (sub == score) {
            v_params.validate();
            const auto trials = parse_trials(v_trials, v_scores);
            const auto eer = compute_eer(trials);
            const double min_dcf = compute_min_dcf(trials, v_params);
            std::printf("EER%% %.4f\nminDCF %.4f\n", 100.0 * eer.eer, min_dcf);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}
