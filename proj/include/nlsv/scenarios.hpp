/// @file scenarios.hpp
/// @brief Built-in scenario library: coefficients, initial fluid velocity and initial
/// kinetic density.

#pragma once

#include "nlsv/coefficient.hpp"
#include "nlsv/particles.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nlsv {

struct Scenario {
    std::string name;
    OscillatoryCoefficient A0;
    OscillatoryCoefficient A1;
    PhaseDensity f0;  ///< empty: no particles
    std::function<VectorField(const GridSpec&)> u0;
    double alpha = 1.0;
    double vmax = 1.0;  ///< velocity half-width of the sampling lattice
};

/// Discretely divergence-free velocity from the stream function
/// psi = amplitude sin^2(pi x / Lx) sin^2(pi y / Ly) sampled at cell corners.
VectorField stream_function_velocity(const GridSpec& g, double amplitude);

/// Smooth cloud: rho(x) = rho0 (1 - |x - c|^2 / R^2)^2 inside the disk of radius R, times
/// a Gaussian in v with mean drift and standard deviation sigma.
PhaseDensity cloud_density(Vec2 center, double radius, double rho0, Vec2 drift, double sigma);

/// "constant", "sinusoidal-A0", "checkerboard-A0", "exp-memory-kernel", "coupled-cloud".
/// Coefficient scenarios carry the cloud initial data; "coupled-cloud" uses a constant
/// A0 = I with the exponential memory kernel.
Scenario scenario_by_name(const std::string& name);
std::vector<std::string> scenario_names();

/// Replaces the coefficients of `base` by those of the named scenario.
Scenario with_coefficients(Scenario base, const std::string& coeff_scenario);

}  // namespace nlsv
