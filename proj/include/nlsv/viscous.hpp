/// @file viscous.hpp
/// @brief Variable-coefficient viscous operator K u = -div(C grad u) on the MAC box grid.
///
/// The operator is built from an energy form so that it is symmetric and inherits the
/// coercivity of the coefficient. C is a 4th-order tensor per cell (see Tensor4).
/// Cell-centered gradient components (du/dx, dv/dy) pair with C at the cell; corner
/// components (du/dy, dv/dx) pair with the average of the adjacent cell tensors; the
/// mixed cell/corner coupling uses the four-corner average inside each cell.
///
/// Stresses are returned at the same native locations as GradientField and are
/// "physical": a uniform C applied to a uniform gradient gives the uniform C:G.
/// The adjoint of the gradient weights each corner by (adjacent cells)/4.

#pragma once

#include "nlsv/fields.hpp"

#include <vector>

namespace nlsv {

class ViscousOperator {
public:
    ViscousOperator() = default;
    ViscousOperator(const GridSpec& g, std::vector<Tensor4> cells);
    ViscousOperator(const GridSpec& g, const Tensor4& uniform);

    const GridSpec& grid() const { return grid_; }
    bool uniform() const { return cells_.size() == 1; }

    GradientField stress(const GradientField& G) const;
    /// K u = G^T stress(grad u), in the cell-area weighted inner product.
    VectorField apply(const VectorField& u) const;
    /// (K u, u) = integral of C grad u : grad u.
    double energy(const VectorField& u) const;
    /// Mean over cells of trace(C)/4; used to scale the Laplacian preconditioner.
    double mean_diffusivity() const;

private:
    const Tensor4& cell(std::size_t c) const { return cells_.size() == 1 ? cells_[0] : cells_[c]; }

    GridSpec grid_;
    std::vector<Tensor4> cells_;
    std::vector<std::array<double, 4>> corner_;  // averaged corner block (11, 12, 21, 22)
};

/// Adjoint of velocity_gradient with the corner weights above: returns -div S as a
/// vector field (boundary nodes zero).
VectorField gradient_transpose(const GradientField& S);

/// Corner weight (number of adjacent cells)/4.
double corner_weight(const GridSpec& g, int i, int j);

/// Physical cell-centered view of a native stress (corner values averaged per cell).
TensorField stress_to_cells(const GradientField& S);

}  // namespace nlsv
