#include "chebyaam/landscape.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "chebyaam/cheby_core.hpp"
#include "chebyaam/io.hpp"
#include "chebyaam/numeric.hpp"

namespace chebyaam {

namespace {

std::vector<double> uniform_axis(std::size_t n) {
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = grid_node(-1.0, 1.0, n, i);
    return axis;
}

std::optional<std::size_t> node_of(const std::vector<double>& axis, double v) {
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (std::abs(axis[i] - v) <= 1e-12) return i;
    }
    return std::nullopt;
}

// Empty cell for non-finite values.
std::string cell(double v) { return std::isfinite(v) ? format_shortest(v) : std::string(); }

}  // namespace

const std::vector<double>& CurveBundle::column(const std::string& label) const {
    for (const auto& [name, values] : columns) {
        if (name == label) return values;
    }
    throw std::out_of_range("no curve column " + label);
}

CurveBundle make_curves(double margin, const std::vector<int>& degrees, std::size_t grid_n) {
    if (grid_n < 2) throw std::invalid_argument("curve grid needs at least 2 points");
    CurveBundle bundle;
    bundle.grid = uniform_axis(grid_n);
    const auto& grid = bundle.grid;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> psi(grid_n), d1(grid_n), d2(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double x = grid[i];
        psi[i] = exact_psi(x, margin);
        d1[i] = exact_psi_derivative(x, margin);
        d2[i] = (1.0 - std::abs(x) < kExactHessianCutoff) ? nan : exact_psi_hessian(x, margin);
    }
    bundle.columns.emplace_back("psi", std::move(psi));
    bundle.columns.emplace_back("psi_d1", std::move(d1));
    bundle.columns.emplace_back("psi_d2", std::move(d2));

    for (int degree : degrees) {
        const auto series = ChebyshevSeries::for_margin(margin, degree);
        const std::string name = "cheb" + std::to_string(degree);
        for (const auto& [existing, unused] : bundle.columns) {
            if (existing == name) throw std::invalid_argument("duplicate degree " + std::to_string(degree));
        }
        std::vector<double> f(grid_n), f1(grid_n), f2(grid_n);
        for (std::size_t i = 0; i < grid_n; ++i) {
            f[i] = clenshaw_eval(series, grid[i]);
            f1[i] = series_derivative(series, grid[i]);
            f2[i] = series_hessian(series, grid[i]);
        }
        bundle.columns.emplace_back(name, std::move(f));
        bundle.columns.emplace_back(name + "_d1", std::move(f1));
        bundle.columns.emplace_back(name + "_d2", std::move(f2));
    }
    return bundle;
}

std::string curves_csv(const CurveBundle& bundle) {
    std::ostringstream out;
    out << 'x';
    for (const auto& [name, values] : bundle.columns) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < bundle.grid.size(); ++i) {
        out << format_shortest(bundle.grid[i]);
        for (const auto& [name, values] : bundle.columns) out << ',' << cell(values[i]);
        out << '\n';
    }
    return out.str();
}

CurveBundle export_curves(double margin, const std::vector<int>& degrees, std::size_t grid_n,
                          const std::filesystem::path& out) {
    CurveBundle bundle = make_curves(margin, degrees, grid_n);
    write_file_atomically(out, curves_csv(bundle));
    return bundle;
}

SurfaceBundle make_surfaces(const std::vector<LossSpec>& specs, std::size_t grid_n) {
    if (specs.empty()) throw std::invalid_argument("no losses given for surface export");
    if (grid_n < 2) throw std::invalid_argument("surface grid needs at least 2 points per axis");
    SurfaceBundle bundle;
    bundle.axis = uniform_axis(grid_n);
    bundle.specs = specs;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        std::string label(loss_name(specs[k].kind));
        for (const auto& existing : bundle.labels) {
            if (existing == label) {
                label += "_" + std::to_string(k);
                break;
            }
        }
        bundle.labels.push_back(label);
        bundle.surfaces.push_back(binary_derivative_surface(specs[k], grid_n));
    }
    for (const auto& [name, point] : {std::pair{"A", kHardPoint}, std::pair{"B", kEasyPoint}}) {
        MarkedPoint mp{name, point.first, point.second, std::nullopt};
        const auto r = node_of(bundle.axis, point.first);
        const auto c = node_of(bundle.axis, point.second);
        if (r && c) mp.node = std::pair{*r, *c};
        bundle.marked.push_back(mp);
    }
    return bundle;
}

std::string surfaces_csv(const SurfaceBundle& bundle) {
    std::ostringstream out;
    out << "loss,s_p,s_n,dL_dsp\n";
    const std::size_t n = bundle.axis.size();
    for (std::size_t k = 0; k < bundle.surfaces.size(); ++k) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                out << bundle.labels[k] << ',' << format_shortest(bundle.axis[r]) << ','
                    << format_shortest(bundle.axis[c]) << ',' << cell(bundle.surfaces[k](r, c)) << '\n';
            }
        }
    }
    return out.str();
}

SurfaceBundle export_surfaces(const std::vector<LossSpec>& specs, std::size_t grid_n,
                              const std::filesystem::path& out) {
    SurfaceBundle bundle = make_surfaces(specs, grid_n);
    write_file_atomically(out, surfaces_csv(bundle));
    return bundle;
}

GapReport derivative_gap(const LossSpec& spec, std::pair<double, double> a, std::pair<double, double> b) {
    const TargetTransform transform(spec);
    GapReport gap;
    gap.grad_a = std::abs(binary_loss_derivative(transform, a.first, a.second));
    gap.grad_b = std::abs(binary_loss_derivative(transform, b.first, b.second));
    gap.ratio = gap.grad_a / gap.grad_b;
    return gap;
}

}  // namespace chebyaam
