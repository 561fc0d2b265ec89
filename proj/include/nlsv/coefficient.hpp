/// @file coefficient.hpp
/// @brief Oscillatory viscosity coefficients A(t, x, y), 1-periodic in the fast variable y.

#pragma once

#include "nlsv/core.hpp"
#include "nlsv/fields.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nlsv {

struct OscillatoryCoefficient {
    using Evaluator = std::function<Mat2(double t, Vec2 x, Vec2 y)>;

    std::string name;
    Evaluator eval;
    double alpha = 0.0;  ///< coercivity constant (meaningful for the instantaneous role)
    double bound = 0.0;  ///< uniform bound on the entries
    bool is_zero = false;
    bool time_dependent = false;
    bool depends_on_x = false;

    /// Optional separable form A(t,x,y) = time_factor(t) * spatial(x,y), used to
    /// contract memory sums before applying the coefficient.
    std::function<double(double)> time_factor;
    std::function<Mat2(Vec2 x, Vec2 y)> spatial;

    bool separable() const { return static_cast<bool>(time_factor) && static_cast<bool>(spatial); }
    Mat2 operator()(double t, Vec2 x, Vec2 y) const { return eval(t, x, y); }
};

/// Componentwise fractional part of x / eps.
Vec2 fast_variable(Vec2 x, double eps);

/// A(t, x, frac(x/eps)).
Mat2 sample_coefficient(const OscillatoryCoefficient& c, double t, Vec2 x, double eps);

// ============================================================================
// Builtins
// ============================================================================

OscillatoryCoefficient make_zero_coefficient();
OscillatoryCoefficient make_constant_coefficient(double alpha);
/// (2 + sin 2 pi y1) I.
OscillatoryCoefficient make_sinusoidal_coefficient();
/// a_lo on cells where (y1 < 1/2) == (y2 < 1/2), a_hi elsewhere, times I.
OscillatoryCoefficient make_checkerboard_coefficient(double a_lo = 1.0, double a_hi = 3.0);
/// exp(-t) * scale * (2 + sin 2 pi y1) I.
OscillatoryCoefficient make_exp_memory_coefficient(double scale = 0.1);
/// Separable kernel k(t) * B(y) from an arbitrary spatial coefficient.
OscillatoryCoefficient make_separable_coefficient(std::function<double(double)> k,
                                                  const OscillatoryCoefficient& spatial,
                                                  const std::string& name);
/// Piecewise-constant cell data: m x m cells, each holding (a11, a12, a22).
/// File format: first token m, then m*m rows "a11 a12 a22" in row-major (y-major) order.
OscillatoryCoefficient load_tabulated_coefficient(const std::string& path);

/// Named lookup: "zero", "constant", "sinusoidal-A0", "checkerboard-A0",
/// "exp-memory-kernel", or "table:<path>". Throws ConfigError for unknown names.
OscillatoryCoefficient coefficient_by_name(const std::string& name);

// ============================================================================
// Audits
// ============================================================================

struct CoefficientAudit {
    double min_coercivity_margin = 0.0;  ///< min over samples of xi.A xi - alpha |xi|^2
    double max_asymmetry = 0.0;
    double max_periodicity_defect = 0.0;
    bool passed(double tol = 1e-12) const {
        return min_coercivity_margin >= -tol && max_asymmetry <= 1e-14 && max_periodicity_defect <= 1e-12;
    }
};

/// Samples (t, x, y, xi) uniformly (t in [0,1], x and y in the unit square).
CoefficientAudit audit_coefficient(const OscillatoryCoefficient& c, int samples = 1000,
                                   std::uint64_t seed = 12345);

/// Per-cell tensors C = I (x) A(t, x_c, x_c/eps) at the cell centers of grid g.
std::vector<Tensor4> sample_cells(const OscillatoryCoefficient& c, const GridSpec& g, double t, double eps);

/// Time factor-free spatial samples for a separable coefficient.
std::vector<Tensor4> sample_cells_spatial(const OscillatoryCoefficient& c, const GridSpec& g, double eps);

}  // namespace nlsv
