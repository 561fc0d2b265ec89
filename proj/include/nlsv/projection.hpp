/// @file projection.hpp
/// @brief Discrete Leray projection onto divergence-free MAC fields.

#pragma once

#include "nlsv/fields.hpp"
#include "nlsv/transforms.hpp"

#include <utility>

namespace nlsv {

/// Reusable projector for one grid. Solves D G phi = D u with Neumann conditions and
/// returns u - G phi. The discrete G is minus the adjoint of D, so the projection is
/// orthogonal in the cell-area weighted inner product.
class Projector {
public:
    explicit Projector(const GridSpec& g);

    /// Projects u in place and returns phi (zero mean). Throws StateError when the
    /// normal boundary faces of u are nonzero and SolverError when the post-solve
    /// divergence exceeds the tolerance.
    ScalarField project(VectorField& u);

    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    NeumannPoisson poisson_;
};

std::pair<VectorField, ScalarField> project_divergence_free(const VectorField& u);

}  // namespace nlsv
