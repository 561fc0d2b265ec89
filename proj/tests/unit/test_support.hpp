/// @file test_support.hpp
/// @brief Small helpers shared by the unit tests.

#pragma once

#include "nlsv/fields.hpp"

#include <random>

namespace nlsv::test {

inline GridSpec grid(int n, double dt = 0.01, double T = 0.1) {
    GridSpec g;
    g.nx = g.ny = n;
    g.dt = dt;
    g.T = T;
    return g;
}

/// Random interior values with every boundary node zero.
inline VectorField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField u(g);
    for (auto& x : u.u_data()) x = d(rng);
    for (auto& x : u.v_data()) x = d(rng);
    u.zero_boundary();
    return u;
}

}  // namespace nlsv::test
