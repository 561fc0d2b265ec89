#include "nlsv/projection.hpp"

#include <algorithm>
#include <cmath>

namespace nlsv {

Projector::Projector(const GridSpec& g) : grid_(g), poisson_(g.nx, g.ny, g.dx(), g.dy()) {}

ScalarField Projector::project(VectorField& u) {
    const int nx = grid_.nx, ny = grid_.ny;
    double normal = 0.0;
    for (int jj = 0; jj <= ny + 1; ++jj) normal = std::max({normal, std::abs(u.u(0, jj)), std::abs(u.u(nx, jj))});
    for (int ii = 0; ii <= nx + 1; ++ii) normal = std::max({normal, std::abs(u.v(ii, 0)), std::abs(u.v(ii, ny))});
    if (normal != 0.0) throw StateError("projection requires zero normal velocity on the walls");
    u.zero_boundary();

    ScalarField d = divergence(u);
    const double scale = std::max(d.max_abs(), 1e-300);
    ScalarField phi(grid_);
    phi.data() = d.data();
    poisson_.solve(phi.data());
    u -= gradient(phi);

    const double res = max_abs_divergence(u);
    const double h2 = std::min(grid_.dx(), grid_.dy());
    if (res > 1e-10 * std::max(scale, 1.0 / h2) && res > 1e-8)
        throw SolverError("divergence-free projection", res, 1);
    return phi;
}

std::pair<VectorField, ScalarField> project_divergence_free(const VectorField& u) {
    Projector p(u.grid());
    VectorField out = u;
    ScalarField phi = p.project(out);
    return {std::move(out), std::move(phi)};
}

}  // namespace nlsv
