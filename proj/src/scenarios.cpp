#include "nlsv/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace nlsv {

VectorField stream_function_velocity(const GridSpec& g, double amplitude) {
    const double pi = std::numbers::pi;
    const double dx = g.dx(), dy = g.dy();
    auto psi = [&](int i, int j) {
        const double sx = std::sin(pi * i * dx / g.Lx), sy = std::sin(pi * j * dy / g.Ly);
        return amplitude * sx * sx * sy * sy;
    };
    VectorField u(g);
    for (int jj = 1; jj <= g.ny; ++jj)
        for (int i = 1; i < g.nx; ++i) u.u(i, jj) = (psi(i, jj) - psi(i, jj - 1)) / dy;
    for (int j = 1; j < g.ny; ++j)
        for (int ii = 1; ii <= g.nx; ++ii) u.v(ii, j) = -(psi(ii, j) - psi(ii - 1, j)) / dx;
    return u;
}

PhaseDensity cloud_density(Vec2 center, double radius, double rho0, Vec2 drift, double sigma) {
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    return [=](Vec2 x, Vec2 v) {
        const Vec2 d = x - center;
        const double r2 = dot(d, d) / (radius * radius);
        if (r2 >= 1.0) return 0.0;
        const double s = 1.0 - r2;
        const Vec2 w = v - drift;
        return rho0 * s * s * norm * std::exp(-0.5 * dot(w, w) / (sigma * sigma));
    };
}

namespace {

Scenario cloud_base(const std::string& name) {
    Scenario s;
    s.name = name;
    s.f0 = cloud_density({0.5, 0.5}, 0.2, 40.0, {0.25, 0.0}, 0.15);
    s.u0 = [](const GridSpec& g) { return stream_function_velocity(g, 0.01); };
    s.vmax = 1.0;
    return s;
}

}  // namespace

Scenario scenario_by_name(const std::string& name) {
    Scenario s = cloud_base(name);
    if (name == "constant") {
        s.A0 = make_constant_coefficient(1.0);
        s.A1 = make_zero_coefficient();
    } else if (name == "sinusoidal-A0") {
        s.A0 = make_sinusoidal_coefficient();
        s.A1 = make_zero_coefficient();
    } else if (name == "checkerboard-A0") {
        s.A0 = make_checkerboard_coefficient();
        s.A1 = make_zero_coefficient();
    } else if (name == "exp-memory-kernel") {
        s.A0 = make_sinusoidal_coefficient();
        s.A1 = make_exp_memory_coefficient();
    } else if (name == "coupled-cloud") {
        s.A0 = make_constant_coefficient(1.0);
        s.A1 = make_exp_memory_coefficient();
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    s.alpha = s.A0.alpha;
    return s;
}

std::vector<std::string> scenario_names() {
    return {"constant", "sinusoidal-A0", "checkerboard-A0", "exp-memory-kernel", "coupled-cloud"};
}

Scenario with_coefficients(Scenario base, const std::string& coeff_scenario) {
    const Scenario c = scenario_by_name(coeff_scenario);
    base.A0 = c.A0;
    base.A1 = c.A1;
    base.alpha = c.alpha;
    base.name = base.name + "+" + coeff_scenario;
    return base;
}

}  // namespace nlsv
