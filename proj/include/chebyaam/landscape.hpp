#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chebyaam/margin_losses.hpp"
#include "chebyaam/matrix.hpp"

namespace chebyaam {

/// Exact psi and truncated-series curves with first and second derivatives.
struct CurveBundle {
    std::vector<double> grid;
    /// (label, values) in CSV column order. NaN marks an empty cell.
    std::vector<std::pair<std::string, std::vector<double>>> columns;

    const std::vector<double>& column(const std::string& label) const;
};

/// Exact second-derivative cells are left empty within this distance of +-1.
inline constexpr double kExactHessianCutoff = 1e-3;

CurveBundle make_curves(double margin, const std::vector<int>& degrees, std::size_t grid_n);
std::string curves_csv(const CurveBundle& bundle);
/// Builds the bundle and writes `x,psi,psi_d1,psi_d2,cheb{d},cheb{d}_d1,cheb{d}_d2,...`.
CurveBundle export_curves(double margin, const std::vector<int>& degrees, std::size_t grid_n,
                          const std::filesystem::path& out);

struct MarkedPoint {
    std::string name;
    double s_p = 0.0;
    double s_n = 0.0;
    /// (row, col) of the point when it lies on a grid node.
    std::optional<std::pair<std::size_t, std::size_t>> node;
};

struct SurfaceBundle {
    std::vector<double> axis;
    std::vector<std::string> labels;
    std::vector<LossSpec> specs;
    /// One matrix per spec; rows over s_p, columns over s_n.
    std::vector<Matrix> surfaces;
    std::vector<MarkedPoint> marked;
};

inline constexpr std::pair<double, double> kHardPoint{0.8, 0.8};
inline constexpr std::pair<double, double> kEasyPoint{0.8, 0.2};

SurfaceBundle make_surfaces(const std::vector<LossSpec>& specs, std::size_t grid_n);
std::string surfaces_csv(const SurfaceBundle& bundle);
/// Long-format `loss,s_p,s_n,dL_dsp`.
SurfaceBundle export_surfaces(const std::vector<LossSpec>& specs, std::size_t grid_n,
                              const std::filesystem::path& out);

struct GapReport {
    double grad_a = 0.0;
    double grad_b = 0.0;
    double ratio = 0.0;
};

/// |dL/ds_p| at the hard point A and easy point B, and their ratio.
GapReport derivative_gap(const LossSpec& spec, std::pair<double, double> a = kHardPoint,
                         std::pair<double, double> b = kEasyPoint);

}  // namespace chebyaam
