/// @file interpolation.hpp
/// @brief Bilinear interpolation from MAC faces and the adjoint (cloud-in-cell) deposition.
///
/// Each velocity component is interpolated bilinearly on its own node lattice, wall nodes
/// included, so globally affine fields are reproduced exactly. Deposition spreads a
/// particle quantity with the same weights divided by the cell area; with the node inner
/// product below the two maps are exact adjoints.

#pragma once

#include "nlsv/fields.hpp"

#include <algorithm>
#include <cmath>

namespace nlsv {

struct Bilinear {
    int i0 = 0;
    int j0 = 0;
    double tx = 0.0;
    double ty = 0.0;
};

/// Bracket of a coordinate on a node lattice {0, h/2, 3h/2, ..., L-h/2, L} (n cells).
inline void bracket_cell_nodes(double s, double h, double inv_h, int n, int& k0, double& t) {
    const double r = s * inv_h + 0.5;
    if (r < 1.0) {
        k0 = 0;
        t = 2.0 * s * inv_h;
    } else if (r >= n) {
        k0 = n;
        t = 2.0 * (s - (n - 0.5) * h) * inv_h;
    } else {
        k0 = static_cast<int>(r);
        t = r - k0;
    }
}

/// Bracket of a coordinate on the uniform node lattice {0, h, ..., n h}.
inline void bracket_uniform_nodes(double s, double inv_h, int n, int& k0, double& t) {
    const double r = s * inv_h;
    k0 = std::min(static_cast<int>(r), n - 1);
    if (k0 < 0) k0 = 0;
    t = r - k0;
}

/// Cell-centered cloud-in-cell stencil, clamped at the walls.
struct CellStencil {
    int i[2];
    int j[2];
    double wx[2];
    double wy[2];
};

/// Spacings and reciprocals of one grid, for evaluating many stencils.
struct StencilMap {
    int nx, ny;
    double dx, dy, inv_dx, inv_dy, inv_area;

    explicit StencilMap(const GridSpec& g)
        : nx(g.nx), ny(g.ny), dx(g.dx()), dy(g.dy()), inv_dx(1.0 / dx), inv_dy(1.0 / dy), inv_area(1.0 / (dx * dy)) {}

    Bilinear u(Vec2 x) const {
        Bilinear b;
        bracket_uniform_nodes(x.x, inv_dx, nx, b.i0, b.tx);
        bracket_cell_nodes(x.y, dy, inv_dy, ny, b.j0, b.ty);
        return b;
    }

    Bilinear v(Vec2 x) const {
        Bilinear b;
        bracket_cell_nodes(x.x, dx, inv_dx, nx, b.i0, b.tx);
        bracket_uniform_nodes(x.y, inv_dy, ny, b.j0, b.ty);
        return b;
    }

    CellStencil cell(Vec2 x) const {
        CellStencil s;
        const double rx = x.x * inv_dx - 0.5, ry = x.y * inv_dy - 0.5;
        const int i0 = static_cast<int>(std::floor(rx)), j0 = static_cast<int>(std::floor(ry));
        const double tx = rx - i0, ty = ry - j0;
        s.i[0] = std::clamp(i0, 0, nx - 1);
        s.i[1] = std::clamp(i0 + 1, 0, nx - 1);
        s.j[0] = std::clamp(j0, 0, ny - 1);
        s.j[1] = std::clamp(j0 + 1, 0, ny - 1);
        s.wx[0] = 1 - tx;
        s.wx[1] = tx;
        s.wy[0] = 1 - ty;
        s.wy[1] = ty;
        return s;
    }
};

inline Bilinear u_stencil(const GridSpec& g, Vec2 x) {
    return StencilMap(g).u(x);
}

inline Bilinear v_stencil(const GridSpec& g, Vec2 x) {
    return StencilMap(g).v(x);
}

inline bool inside_closed(const GridSpec& g, Vec2 x) {
    return x.x >= 0.0 && x.x <= g.Lx && x.y >= 0.0 && x.y <= g.Ly;
}

/// Interpolation with precomputed u and v stencils.
inline Vec2 interpolate_stencil(const VectorField& u, const Bilinear& a, const Bilinear& b) {
    const double ux = (1 - a.tx) * (1 - a.ty) * u.u(a.i0, a.j0) + a.tx * (1 - a.ty) * u.u(a.i0 + 1, a.j0) +
                      (1 - a.tx) * a.ty * u.u(a.i0, a.j0 + 1) + a.tx * a.ty * u.u(a.i0 + 1, a.j0 + 1);
    const double vy = (1 - b.tx) * (1 - b.ty) * u.v(b.i0, b.j0) + b.tx * (1 - b.ty) * u.v(b.i0 + 1, b.j0) +
                      (1 - b.tx) * b.ty * u.v(b.i0, b.j0 + 1) + b.tx * b.ty * u.v(b.i0 + 1, b.j0 + 1);
    return {ux, vy};
}

/// Interpolation without the domain check (caller guarantees x in the closed box).
inline Vec2 interpolate_unchecked(const VectorField& u, Vec2 x) {
    const StencilMap m(u.grid());
    return interpolate_stencil(u, m.u(x), m.v(x));
}

/// Throws DomainError for points outside the closed domain.
Vec2 interpolate_velocity(const VectorField& u, Vec2 x);

/// Adds value * inv_area to the nodes of precomputed u and v stencils.
inline void deposit_stencil(VectorField& out, const Bilinear& a, const Bilinear& b, Vec2 value, double inv_area) {
    const double px = value.x * inv_area, py = value.y * inv_area;
    out.u(a.i0, a.j0) += (1 - a.tx) * (1 - a.ty) * px;
    out.u(a.i0 + 1, a.j0) += a.tx * (1 - a.ty) * px;
    out.u(a.i0, a.j0 + 1) += (1 - a.tx) * a.ty * px;
    out.u(a.i0 + 1, a.j0 + 1) += a.tx * a.ty * px;
    out.v(b.i0, b.j0) += (1 - b.tx) * (1 - b.ty) * py;
    out.v(b.i0 + 1, b.j0) += b.tx * (1 - b.ty) * py;
    out.v(b.i0, b.j0 + 1) += (1 - b.tx) * b.ty * py;
    out.v(b.i0 + 1, b.j0 + 1) += b.tx * b.ty * py;
}

/// Adds value * weight / (dx dy) to the nodes around x (no domain check).
inline void deposit_unchecked(VectorField& out, Vec2 x, Vec2 value) {
    const StencilMap m(out.grid());
    deposit_stencil(out, m.u(x), m.v(x), value, m.inv_area);
}

/// Sum over all nodes (walls included) of a.b times the cell area.
double node_inner_product(const VectorField& a, const VectorField& b);

/// Sum over all nodes of the field times the cell area (integral of a deposited density).
Vec2 node_total(const VectorField& a);

/// Cloud-in-cell deposition of a scalar weight onto cell centers, with the stencil
/// clamped at the walls so the weights remain a partition of unity.
void deposit_cell_density(ScalarField& rho, Vec2 x, double w);

/// Same deposition for a vector quantity (two cell-centered fields).
void deposit_cell_vector(ScalarField& fx, ScalarField& fy, Vec2 x, Vec2 value);

/// deposit_cell_vector with a precomputed map of the fields' grid.
inline void deposit_cell_vector(ScalarField& fx, ScalarField& fy, const StencilMap& m, Vec2 x, Vec2 value) {
    const CellStencil s = m.cell(x);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double w = s.wx[a] * s.wy[b] * m.inv_area;
            fx(s.i[a], s.j[b]) += w * value.x;
            fy(s.i[a], s.j[b]) += w * value.y;
        }
}

}  // namespace nlsv
