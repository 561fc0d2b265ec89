/// @file fields.hpp
/// @brief Grid description and MAC-staggered field containers on the box (0,Lx)x(0,Ly).
///
/// Staggering convention (row-major, row index = y index):
///   - ScalarField:  cell centers (i, j), i in [0,nx), j in [0,ny).
///   - VectorField:  u on vertical faces  u(i, jj), i in [0,nx],   jj in [0,ny+1];
///                   v on horizontal faces v(ii, j), ii in [0,nx+1], j in [0,ny].
///     Rows jj=0 / jj=ny+1 of u (and columns ii=0 / ii=nx+1 of v) hold the tangential
///     velocity on the walls y=0 / y=Ly (x=0 / x=Lx); interior row jj sits at y=(jj-1/2)dy.
///     Normal wall faces are u(0,.), u(nx,.), v(.,0), v(.,ny).
///   - TensorField:  one 2x2 matrix per cell.
///   - GradientField: the four velocity-gradient components at their native MAC
///     locations: d(u)/dx and d(v)/dy at cell centers, d(u)/dy and d(v)/dx at the
///     (nx+1)x(ny+1) cell corners.

#pragma once

#include "nlsv/core.hpp"

#include <cstddef>
#include <vector>

namespace nlsv {

// ============================================================================
// GridSpec
// ============================================================================

struct GridSpec {
    int nx = 32;
    int ny = 32;
    double Lx = 1.0;
    double Ly = 1.0;
    double dt = 1e-2;
    double T = 1.0;
    double eps = 1.0;

    double dx() const { return Lx / nx; }
    double dy() const { return Ly / ny; }
    double cell_area() const { return dx() * dy(); }
    int steps() const;

    /// Throws ConfigError when an invariant is violated. With fine_scale set the
    /// resolution constraint nx*eps >= 8 is checked as well.
    void validate(bool fine_scale = false) const;

    bool operator==(const GridSpec&) const = default;
};

/// True when 1/eps is an integer (to 1e-9 relative).
bool is_reciprocal_integer(double eps);

/// Grids with equal cell counts and extents.
bool same_mesh(const GridSpec& a, const GridSpec& b);

// ============================================================================
// Containers
// ============================================================================

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double value = 0.0);

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * nx_ + i]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * nx_ + i]; }

    const GridSpec& grid() const { return grid_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double mean() const;
    double max_abs() const;

private:
    GridSpec grid_;
    int nx_ = 0;
    std::vector<double> data_;
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const GridSpec& g);

    double& u(int i, int jj) { return u_[static_cast<std::size_t>(jj) * (nx_ + 1) + i]; }
    double u(int i, int jj) const { return u_[static_cast<std::size_t>(jj) * (nx_ + 1) + i]; }
    double& v(int ii, int j) { return v_[static_cast<std::size_t>(j) * (nx_ + 2) + ii]; }
    double v(int ii, int j) const { return v_[static_cast<std::size_t>(j) * (nx_ + 2) + ii]; }

    const GridSpec& grid() const { return grid_; }
    std::vector<double>& u_data() { return u_; }
    std::vector<double>& v_data() { return v_; }
    const std::vector<double>& u_data() const { return u_; }
    const std::vector<double>& v_data() const { return v_; }

    /// Node coordinates (walls included).
    Vec2 u_position(int i, int jj) const;
    Vec2 v_position(int ii, int j) const;

    void fill(double value);
    /// Sets every boundary node (normal and tangential) to zero.
    void zero_boundary();
    /// Largest |value| over boundary nodes.
    double boundary_max_abs() const;
    double max_abs() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    /// this += s * o
    void axpy(double s, const VectorField& o);

private:
    GridSpec grid_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> u_;
    std::vector<double> v_;
};

class TensorField {
public:
    TensorField() = default;
    explicit TensorField(const GridSpec& g);

    Mat2& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * nx_ + i]; }
    const Mat2& operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * nx_ + i]; }

    const GridSpec& grid() const { return grid_; }
    std::vector<Mat2>& data() { return data_; }
    const std::vector<Mat2>& data() const { return data_; }
    double max_abs() const;

private:
    GridSpec grid_;
    int nx_ = 0;
    std::vector<Mat2> data_;
};

/// Velocity gradient (or a stress with the same layout) at native MAC locations.
struct GradientField {
    GradientField() = default;
    explicit GradientField(const GridSpec& g);

    GridSpec grid;
    std::vector<double> dudx;  // cells,   nx*ny
    std::vector<double> dvdy;  // cells,   nx*ny
    std::vector<double> dudy;  // corners, (nx+1)*(ny+1)
    std::vector<double> dvdx;  // corners, (nx+1)*(ny+1)

    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * grid.nx + i; }
    std::size_t corner(int i, int j) const { return static_cast<std::size_t>(j) * (grid.nx + 1) + i; }

    void fill(const Mat2& g);
    void axpy(double s, const GradientField& o);
    void scale(double s);
    /// Cell-centered view: corner components averaged over the four cell corners.
    TensorField to_cell_tensor() const;
};

// ============================================================================
// Discrete operators and norms
// ============================================================================

/// Discrete divergence at cell centers (uses normal boundary faces).
ScalarField divergence(const VectorField& u);
double max_abs_divergence(const VectorField& u);

/// Gradient of a cell-centered scalar onto interior faces; boundary faces are zero.
VectorField gradient(const ScalarField& phi);

/// Velocity gradient at native locations. Wall corners use the half-cell distance
/// to the tangential wall node.
GradientField velocity_gradient(const VectorField& u);

/// Euclidean inner product over interior velocity unknowns, weighted by the cell area.
double inner_product(const VectorField& a, const VectorField& b);
/// Discrete L2(Omega) norm squared (interior nodes, cell-area weights).
double l2_norm_sq(const VectorField& a);
/// Discrete |grad u|^2 integrated over Omega: cell terms plus corner terms weighted by
/// (number of adjacent cells)/4.
double gradient_norm_sq(const VectorField& u);

/// Momentum (integral of u) over interior nodes.
Vec2 momentum(const VectorField& u);

}  // namespace nlsv
