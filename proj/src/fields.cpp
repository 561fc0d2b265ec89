#include "nlsv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlsv {

// ============================================================================
// GridSpec
// ============================================================================

int GridSpec::steps() const {
    return static_cast<int>(std::llround(T / dt));
}

bool is_reciprocal_integer(double eps) {
    if (!(eps > 0.0)) return false;
    const double inv = 1.0 / eps;
    return std::abs(inv - std::round(inv)) <= 1e-9 * inv;
}

void GridSpec::validate(bool fine_scale) const {
    std::ostringstream err;
    if (nx < 4 || ny < 4) err << "grid needs nx, ny >= 4 (got " << nx << "x" << ny << "); ";
    if (!(Lx > 0.0) || !(Ly > 0.0)) err << "domain extents must be positive; ";
    if (!(dt > 0.0)) err << "dt must be positive; ";
    if (!(T >= dt)) err << "T must be >= dt; ";
    if (!(eps > 0.0 && eps <= 1.0)) err << "eps must lie in (0,1]; ";
    else if (!is_reciprocal_integer(eps)) err << "1/eps must be an integer (eps=" << eps << "); ";
    if (fine_scale && nx * eps < 8.0 - 1e-9)
        err << "fine-scale runs need nx*eps >= 8 cells per period (nx=" << nx << ", eps=" << eps << "); ";
    if (!err.str().empty()) throw ConfigError(err.str());
}

bool same_mesh(const GridSpec& a, const GridSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.Lx == b.Lx && a.Ly == b.Ly;
}

// ============================================================================
// ScalarField
// ============================================================================

ScalarField::ScalarField(const GridSpec& g, double value)
    : grid_(g), nx_(g.nx), data_(static_cast<std::size_t>(g.nx) * g.ny, value) {}

double ScalarField::mean() const {
    double s = 0.0;
    for (double x : data_) s += x;
    return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

// ============================================================================
// VectorField
// ============================================================================

VectorField::VectorField(const GridSpec& g)
    : grid_(g), nx_(g.nx), ny_(g.ny),
      u_(static_cast<std::size_t>(g.nx + 1) * (g.ny + 2), 0.0),
      v_(static_cast<std::size_t>(g.nx + 2) * (g.ny + 1), 0.0) {}

Vec2 VectorField::u_position(int i, int jj) const {
    const double dy = grid_.dy();
    double y = (jj - 0.5) * dy;
    if (jj == 0) y = 0.0;
    if (jj == ny_ + 1) y = grid_.Ly;
    return {i * grid_.dx(), y};
}

Vec2 VectorField::v_position(int ii, int j) const {
    const double dx = grid_.dx();
    double x = (ii - 0.5) * dx;
    if (ii == 0) x = 0.0;
    if (ii == nx_ + 1) x = grid_.Lx;
    return {x, j * grid_.dy()};
}

void VectorField::fill(double value) {
    std::fill(u_.begin(), u_.end(), value);
    std::fill(v_.begin(), v_.end(), value);
}

void VectorField::zero_boundary() {
    for (int jj = 0; jj <= ny_ + 1; ++jj) {
        u(0, jj) = 0.0;
        u(nx_, jj) = 0.0;
    }
    for (int i = 0; i <= nx_; ++i) {
        u(i, 0) = 0.0;
        u(i, ny_ + 1) = 0.0;
    }
    for (int j = 0; j <= ny_; ++j) {
        v(0, j) = 0.0;
        v(nx_ + 1, j) = 0.0;
    }
    for (int ii = 0; ii <= nx_ + 1; ++ii) {
        v(ii, 0) = 0.0;
        v(ii, ny_) = 0.0;
    }
}

double VectorField::boundary_max_abs() const {
    double m = 0.0;
    for (int jj = 0; jj <= ny_ + 1; ++jj) m = std::max({m, std::abs(u(0, jj)), std::abs(u(nx_, jj))});
    for (int i = 0; i <= nx_; ++i) m = std::max({m, std::abs(u(i, 0)), std::abs(u(i, ny_ + 1))});
    for (int j = 0; j <= ny_; ++j) m = std::max({m, std::abs(v(0, j)), std::abs(v(nx_ + 1, j))});
    for (int ii = 0; ii <= nx_ + 1; ++ii) m = std::max({m, std::abs(v(ii, 0)), std::abs(v(ii, ny_))});
    return m;
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (double x : u_) m = std::max(m, std::abs(x));
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    axpy(1.0, o);
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    axpy(-1.0, o);
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (double& x : u_) x *= s;
    for (double& x : v_) x *= s;
    return *this;
}

void VectorField::axpy(double s, const VectorField& o) {
    for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += s * o.u_[k];
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += s * o.v_[k];
}

// ============================================================================
// TensorField / GradientField
// ============================================================================

TensorField::TensorField(const GridSpec& g)
    : grid_(g), nx_(g.nx), data_(static_cast<std::size_t>(g.nx) * g.ny) {}

double TensorField::max_abs() const {
    double m = 0.0;
    for (const auto& t : data_) m = std::max(m, nlsv::max_abs(t));
    return m;
}

GradientField::GradientField(const GridSpec& g)
    : grid(g),
      dudx(static_cast<std::size_t>(g.nx) * g.ny, 0.0),
      dvdy(static_cast<std::size_t>(g.nx) * g.ny, 0.0),
      dudy(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0),
      dvdx(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0) {}

void GradientField::fill(const Mat2& g) {
    std::fill(dudx.begin(), dudx.end(), g.xx);
    std::fill(dvdy.begin(), dvdy.end(), g.yy);
    std::fill(dudy.begin(), dudy.end(), g.xy);
    std::fill(dvdx.begin(), dvdx.end(), g.yx);
}

void GradientField::axpy(double s, const GradientField& o) {
    for (std::size_t k = 0; k < dudx.size(); ++k) {
        dudx[k] += s * o.dudx[k];
        dvdy[k] += s * o.dvdy[k];
    }
    for (std::size_t k = 0; k < dudy.size(); ++k) {
        dudy[k] += s * o.dudy[k];
        dvdx[k] += s * o.dvdx[k];
    }
}

void GradientField::scale(double s) {
    for (double& x : dudx) x *= s;
    for (double& x : dvdy) x *= s;
    for (double& x : dudy) x *= s;
    for (double& x : dvdx) x *= s;
}

TensorField GradientField::to_cell_tensor() const {
    TensorField t(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            Mat2& m = t(i, j);
            m.xx = dudx[cell(i, j)];
            m.yy = dvdy[cell(i, j)];
            m.xy = 0.25 * (dudy[corner(i, j)] + dudy[corner(i + 1, j)] + dudy[corner(i, j + 1)] +
                           dudy[corner(i + 1, j + 1)]);
            m.yx = 0.25 * (dvdx[corner(i, j)] + dvdx[corner(i + 1, j)] + dvdx[corner(i, j + 1)] +
                           dvdx[corner(i + 1, j + 1)]);
        }
    }
    return t;
}

// ============================================================================
// Operators
// ============================================================================

ScalarField divergence(const VectorField& u) {
    const auto& g = u.grid();
    const double dx = g.dx(), dy = g.dy();
    ScalarField d(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d(i, j) = (u.u(i + 1, j + 1) - u.u(i, j + 1)) / dx + (u.v(i + 1, j + 1) - u.v(i + 1, j)) / dy;
    return d;
}

double max_abs_divergence(const VectorField& u) {
    return divergence(u).max_abs();
}

VectorField gradient(const ScalarField& phi) {
    const auto& g = phi.grid();
    const double dx = g.dx(), dy = g.dy();
    VectorField out(g);
    for (int jj = 1; jj <= g.ny; ++jj)
        for (int i = 1; i < g.nx; ++i) out.u(i, jj) = (phi(i, jj - 1) - phi(i - 1, jj - 1)) / dx;
    for (int j = 1; j < g.ny; ++j)
        for (int ii = 1; ii <= g.nx; ++ii) out.v(ii, j) = (phi(ii - 1, j) - phi(ii - 1, j - 1)) / dy;
    return out;
}

GradientField velocity_gradient(const VectorField& u) {
    const auto& g = u.grid();
    const int nx = g.nx, ny = g.ny;
    const double dx = g.dx(), dy = g.dy();
    GradientField G(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            G.dudx[G.cell(i, j)] = (u.u(i + 1, j + 1) - u.u(i, j + 1)) / dx;
            G.dvdy[G.cell(i, j)] = (u.v(i + 1, j + 1) - u.v(i + 1, j)) / dy;
        }
    }
    for (int j = 0; j <= ny; ++j) {
        const double hy = (j == 0 || j == ny) ? 0.5 * dy : dy;
        for (int i = 0; i <= nx; ++i) {
            const double hx = (i == 0 || i == nx) ? 0.5 * dx : dx;
            G.dudy[G.corner(i, j)] = (u.u(i, j + 1) - u.u(i, j)) / hy;
            G.dvdx[G.corner(i, j)] = (u.v(i + 1, j) - u.v(i, j)) / hx;
        }
    }
    return G;
}

double inner_product(const VectorField& a, const VectorField& b) {
    const auto& g = a.grid();
    double s = 0.0;
    for (int jj = 1; jj <= g.ny; ++jj)
        for (int i = 1; i < g.nx; ++i) s += a.u(i, jj) * b.u(i, jj);
    for (int j = 1; j < g.ny; ++j)
        for (int ii = 1; ii <= g.nx; ++ii) s += a.v(ii, j) * b.v(ii, j);
    return s * g.cell_area();
}

double l2_norm_sq(const VectorField& a) {
    return inner_product(a, a);
}

double gradient_norm_sq(const VectorField& u) {
    const auto& g = u.grid();
    const GradientField G = velocity_gradient(u);
    double s = 0.0;
    for (std::size_t k = 0; k < G.dudx.size(); ++k) s += G.dudx[k] * G.dudx[k] + G.dvdy[k] * G.dvdy[k];
    for (int j = 0; j <= g.ny; ++j) {
        const int cy = (j == 0 || j == g.ny) ? 1 : 2;
        for (int i = 0; i <= g.nx; ++i) {
            const int cx = (i == 0 || i == g.nx) ? 1 : 2;
            const double w = 0.25 * cx * cy;
            const auto c = G.corner(i, j);
            s += w * (G.dudy[c] * G.dudy[c] + G.dvdx[c] * G.dvdx[c]);
        }
    }
    return s * g.cell_area();
}

Vec2 momentum(const VectorField& u) {
    const auto& g = u.grid();
    Vec2 m;
    for (int jj = 1; jj <= g.ny; ++jj)
        for (int i = 1; i < g.nx; ++i) m.x += u.u(i, jj);
    for (int j = 1; j < g.ny; ++j)
        for (int ii = 1; ii <= g.nx; ++ii) m.y += u.v(ii, j);
    return g.cell_area() * m;
}

}  // namespace nlsv
