#include "nlsv/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace nlsv {

Vec2 fast_variable(Vec2 x, double eps) {
    const double a = x.x / eps, b = x.y / eps;
    return {a - std::floor(a), b - std::floor(b)};
}

Mat2 sample_coefficient(const OscillatoryCoefficient& c, double t, Vec2 x, double eps) {
    return c.eval(t, x, fast_variable(x, eps));
}

// ============================================================================
// Builtins
// ============================================================================

OscillatoryCoefficient make_zero_coefficient() {
    OscillatoryCoefficient c;
    c.name = "zero";
    c.eval = [](double, Vec2, Vec2) { return Mat2{}; };
    c.is_zero = true;
    return c;
}

OscillatoryCoefficient make_constant_coefficient(double alpha) {
    OscillatoryCoefficient c;
    c.name = "constant";
    c.eval = [alpha](double, Vec2, Vec2) { return Mat2::identity(alpha); };
    c.alpha = alpha;
    c.bound = alpha;
    return c;
}

OscillatoryCoefficient make_sinusoidal_coefficient() {
    OscillatoryCoefficient c;
    c.name = "sinusoidal-A0";
    c.eval = [](double, Vec2, Vec2 y) {
        return Mat2::identity(2.0 + std::sin(2.0 * std::numbers::pi * y.x));
    };
    c.alpha = 1.0;
    c.bound = 3.0;
    return c;
}

OscillatoryCoefficient make_checkerboard_coefficient(double a_lo, double a_hi) {
    OscillatoryCoefficient c;
    c.name = "checkerboard-A0";
    c.eval = [a_lo, a_hi](double, Vec2, Vec2 y) {
        const double y1 = y.x - std::floor(y.x), y2 = y.y - std::floor(y.y);
        return Mat2::identity(((y1 < 0.5) == (y2 < 0.5)) ? a_lo : a_hi);
    };
    c.alpha = std::min(a_lo, a_hi);
    c.bound = std::max(a_lo, a_hi);
    return c;
}

OscillatoryCoefficient make_separable_coefficient(std::function<double(double)> k,
                                                  const OscillatoryCoefficient& spatial,
                                                  const std::string& name) {
    OscillatoryCoefficient c;
    c.name = name;
    auto s = spatial.eval;
    c.eval = [k, s](double t, Vec2 x, Vec2 y) { return k(t) * s(0.0, x, y); };
    c.time_factor = k;
    c.spatial = [s](Vec2 x, Vec2 y) { return s(0.0, x, y); };
    c.alpha = 0.0;
    c.bound = spatial.bound;
    c.time_dependent = true;
    c.depends_on_x = spatial.depends_on_x;
    return c;
}

OscillatoryCoefficient make_exp_memory_coefficient(double scale) {
    OscillatoryCoefficient b = make_sinusoidal_coefficient();
    auto e = b.eval;
    b.eval = [e, scale](double t, Vec2 x, Vec2 y) { return scale * e(t, x, y); };
    b.bound = 3.0 * scale;
    return make_separable_coefficient([](double t) { return std::exp(-t); }, b, "exp-memory-kernel");
}

OscillatoryCoefficient load_tabulated_coefficient(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coefficient table '" + path + "'");
    int m = 0;
    if (!(in >> m) || m < 1) throw ConfigError("coefficient table '" + path + "': bad cell count");
    auto data = std::make_shared<std::vector<Mat2>>(static_cast<std::size_t>(m) * m);
    double alpha = 1e300, bound = 0.0;
    for (std::size_t k = 0; k < data->size(); ++k) {
        double a11, a12, a22;
        if (!(in >> a11 >> a12 >> a22))
            throw ConfigError("coefficient table '" + path + "': expected " + std::to_string(data->size()) +
                              " rows, got " + std::to_string(k));
        (*data)[k] = Mat2{a11, a12, a12, a22};
        const double tr = a11 + a22, det = a11 * a22 - a12 * a12;
        const double lmin = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        alpha = std::min(alpha, lmin);
        bound = std::max({bound, std::abs(a11), std::abs(a12), std::abs(a22)});
    }
    if (!(alpha > 0.0)) throw ConfigError("coefficient table '" + path + "' is not coercive");
    OscillatoryCoefficient c;
    c.name = "table:" + path;
    c.eval = [data, m](double, Vec2, Vec2 y) {
        int i = static_cast<int>(std::floor((y.x - std::floor(y.x)) * m));
        int j = static_cast<int>(std::floor((y.y - std::floor(y.y)) * m));
        i = std::clamp(i, 0, m - 1);
        j = std::clamp(j, 0, m - 1);
        return (*data)[static_cast<std::size_t>(j) * m + i];
    };
    c.alpha = alpha;
    c.bound = bound;
    return c;
}

OscillatoryCoefficient coefficient_by_name(const std::string& name) {
    if (name == "zero") return make_zero_coefficient();
    if (name == "constant") return make_constant_coefficient(1.0);
    if (name == "sinusoidal-A0") return make_sinusoidal_coefficient();
    if (name == "checkerboard-A0") return make_checkerboard_coefficient();
    if (name == "exp-memory-kernel") return make_exp_memory_coefficient();
    if (name.rfind("table:", 0) == 0) return load_tabulated_coefficient(name.substr(6));
    throw ConfigError("unknown coefficient '" + name + "'");
}

// ============================================================================
// Audits and sampling
// ============================================================================

CoefficientAudit audit_coefficient(const OscillatoryCoefficient& c, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0), N(-1.0, 1.0);
    CoefficientAudit a;
    a.min_coercivity_margin = 1e300;
    for (int s = 0; s < samples; ++s) {
        const double t = U(rng);
        const Vec2 x{U(rng), U(rng)}, y{U(rng), U(rng)}, xi{N(rng), N(rng)};
        const Mat2 A = c.eval(t, x, y);
        a.min_coercivity_margin = std::min(a.min_coercivity_margin, dot(xi, A * xi) - c.alpha * dot(xi, xi));
        a.max_asymmetry = std::max(a.max_asymmetry, std::abs(A.xy - A.yx));
        const Mat2 A1 = c.eval(t, x, {y.x + 1.0, y.y});
        const Mat2 A2 = c.eval(t, x, {y.x, y.y + 1.0});
        a.max_periodicity_defect = std::max({a.max_periodicity_defect, max_abs(A1 - A), max_abs(A2 - A)});
    }
    if (c.is_zero) a.min_coercivity_margin = 0.0;
    return a;
}

std::vector<Tensor4> sample_cells(const OscillatoryCoefficient& c, const GridSpec& g, double t, double eps) {
    std::vector<Tensor4> out(static_cast<std::size_t>(g.nx) * g.ny);
    const double dx = g.dx(), dy = g.dy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 x{(i + 0.5) * dx, (j + 0.5) * dy};
            out[static_cast<std::size_t>(j) * g.nx + i] = Tensor4::from_matrix(sample_coefficient(c, t, x, eps));
        }
    return out;
}

std::vector<Tensor4> sample_cells_spatial(const OscillatoryCoefficient& c, const GridSpec& g, double eps) {
    if (!c.separable()) throw StateError("sample_cells_spatial needs a separable coefficient");
    std::vector<Tensor4> out(static_cast<std::size_t>(g.nx) * g.ny);
    const double dx = g.dx(), dy = g.dy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 x{(i + 0.5) * dx, (j + 0.5) * dy};
            out[static_cast<std::size_t>(j) * g.nx + i] = Tensor4::from_matrix(c.spatial(x, fast_variable(x, eps)));
        }
    return out;
}

}  // namespace nlsv
