#include "nlsv/viscous.hpp"

#include <utility>

namespace nlsv {

namespace {

Tensor4 symmetrized(const Tensor4& c) {
    Tensor4 s;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s(a, b) = 0.5 * (c(a, b) + c(b, a));
    return s;
}

}  // namespace

double corner_weight(const GridSpec& g, int i, int j) {
    const int cx = (i == 0 || i == g.nx) ? 1 : 2;
    const int cy = (j == 0 || j == g.ny) ? 1 : 2;
    return 0.25 * cx * cy;
}

ViscousOperator::ViscousOperator(const GridSpec& g, std::vector<Tensor4> cells)
    : grid_(g), cells_(std::move(cells)) {
    for (auto& c : cells_) c = symmetrized(c);
    const int nx = g.nx, ny = g.ny;
    if (cells_.size() == 1) {
        const Tensor4& C = cells_[0];
        corner_.assign(1, {C(1, 1), C(1, 2), C(2, 1), C(2, 2)});
        return;
    }
    corner_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), {0.0, 0.0, 0.0, 0.0});
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
            int n = 0;
            for (int cj = j - 1; cj <= j; ++cj)
                for (int ci = i - 1; ci <= i; ++ci) {
                    if (ci < 0 || cj < 0 || ci >= nx || cj >= ny) continue;
                    const Tensor4& C = cell(static_cast<std::size_t>(cj) * nx + ci);
                    w[0] += C(1, 1);
                    w[1] += C(1, 2);
                    w[2] += C(2, 1);
                    w[3] += C(2, 2);
                    ++n;
                }
            for (auto& x : w) x /= n;
            corner_[static_cast<std::size_t>(j) * (nx + 1) + i] = w;
        }
}

ViscousOperator::ViscousOperator(const GridSpec& g, const Tensor4& uniform)
    : ViscousOperator(g, std::vector<Tensor4>{uniform}) {}

double ViscousOperator::mean_diffusivity() const {
    double s = 0.0;
    for (const auto& C : cells_) s += 0.25 * (C(0, 0) + C(1, 1) + C(2, 2) + C(3, 3));
    return s / static_cast<double>(cells_.size());
}

GradientField ViscousOperator::stress(const GradientField& G) const {
    const int nx = grid_.nx, ny = grid_.ny;
    GradientField S(grid_);
    // Cell-to-corner coupling terms, accumulated per cell then averaged onto corners.
    std::vector<double> t1(static_cast<std::size_t>(nx) * ny), t2(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = G.cell(i, j);
            const Tensor4& C = cell(c);
            const double g0 = G.dudx[c], g3 = G.dvdy[c];
            const double g1 = 0.25 * (G.dudy[G.corner(i, j)] + G.dudy[G.corner(i + 1, j)] +
                                      G.dudy[G.corner(i, j + 1)] + G.dudy[G.corner(i + 1, j + 1)]);
            const double g2 = 0.25 * (G.dvdx[G.corner(i, j)] + G.dvdx[G.corner(i + 1, j)] +
                                      G.dvdx[G.corner(i, j + 1)] + G.dvdx[G.corner(i + 1, j + 1)]);
            S.dudx[c] = C(0, 0) * g0 + C(0, 3) * g3 + C(0, 1) * g1 + C(0, 2) * g2;
            S.dvdy[c] = C(3, 0) * g0 + C(3, 3) * g3 + C(3, 1) * g1 + C(3, 2) * g2;
            t1[c] = C(1, 0) * g0 + C(1, 3) * g3;
            t2[c] = C(2, 0) * g0 + C(2, 3) * g3;
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const std::size_t n = G.corner(i, j);
            const auto& w = corner_.size() == 1 ? corner_[0] : corner_[n];
            double a1 = 0.0, a2 = 0.0;
            int cnt = 0;
            for (int cj = j - 1; cj <= j; ++cj)
                for (int ci = i - 1; ci <= i; ++ci) {
                    if (ci < 0 || cj < 0 || ci >= nx || cj >= ny) continue;
                    const std::size_t c = G.cell(ci, cj);
                    a1 += t1[c];
                    a2 += t2[c];
                    ++cnt;
                }
            S.dudy[n] = w[0] * G.dudy[n] + w[1] * G.dvdx[n] + a1 / cnt;
            S.dvdx[n] = w[2] * G.dudy[n] + w[3] * G.dvdx[n] + a2 / cnt;
        }
    return S;
}

VectorField gradient_transpose(const GradientField& S) {
    const GridSpec& g = S.grid;
    const int nx = g.nx, ny = g.ny;
    const double dx = g.dx(), dy = g.dy();
    auto hy = [&](int j) { return (j == 0 || j == ny) ? 0.5 * dy : dy; };
    auto hx = [&](int i) { return (i == 0 || i == nx) ? 0.5 * dx : dx; };
    VectorField out(g);
    for (int jj = 1; jj <= ny; ++jj) {
        const int j0 = jj - 1, j1 = jj;
        const double f0 = 1.0 / hy(j0), f1 = 1.0 / hy(j1);
        for (int i = 1; i < nx; ++i) {
            out.u(i, jj) = (S.dudx[S.cell(i - 1, jj - 1)] - S.dudx[S.cell(i, jj - 1)]) / dx +
                           corner_weight(g, i, j0) * S.dudy[S.corner(i, j0)] * f0 -
                           corner_weight(g, i, j1) * S.dudy[S.corner(i, j1)] * f1;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int ii = 1; ii <= nx; ++ii) {
            const int i0 = ii - 1, i1 = ii;
            out.v(ii, j) = (S.dvdy[S.cell(ii - 1, j - 1)] - S.dvdy[S.cell(ii - 1, j)]) / dy +
                           corner_weight(g, i0, j) * S.dvdx[S.corner(i0, j)] / hx(i0) -
                           corner_weight(g, i1, j) * S.dvdx[S.corner(i1, j)] / hx(i1);
        }
    }
    return out;
}

VectorField ViscousOperator::apply(const VectorField& u) const {
    return gradient_transpose(stress(velocity_gradient(u)));
}

double ViscousOperator::energy(const VectorField& u) const {
    return inner_product(apply(u), u);
}

TensorField stress_to_cells(const GradientField& S) {
    return S.to_cell_tensor();
}

}  // namespace nlsv
