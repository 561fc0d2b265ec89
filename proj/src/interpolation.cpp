#include "nlsv/interpolation.hpp"

#include <sstream>

namespace nlsv {

Vec2 interpolate_velocity(const VectorField& u, Vec2 x) {
    if (!inside_closed(u.grid(), x)) {
        std::ostringstream os;
        os << "interpolation point (" << x.x << ", " << x.y << ") lies outside the domain";
        throw DomainError(os.str());
    }
    return interpolate_unchecked(u, x);
}

double node_inner_product(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    const auto& au = a.u_data();
    const auto& bu = b.u_data();
    const auto& av = a.v_data();
    const auto& bv = b.v_data();
    for (std::size_t k = 0; k < au.size(); ++k) s += au[k] * bu[k];
    for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
    return s * a.grid().cell_area();
}

Vec2 node_total(const VectorField& a) {
    Vec2 s;
    for (double x : a.u_data()) s.x += x;
    for (double x : a.v_data()) s.y += x;
    return a.grid().cell_area() * s;
}

void deposit_cell_density(ScalarField& rho, Vec2 x, double w) {
    const StencilMap m(rho.grid());
    const CellStencil s = m.cell(x);
    const double f = w * m.inv_area;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) rho(s.i[a], s.j[b]) += s.wx[a] * s.wy[b] * f;
}

void deposit_cell_vector(ScalarField& fx, ScalarField& fy, Vec2 x, Vec2 value) {
    deposit_cell_vector(fx, fy, StencilMap(fx.grid()), x, value);
}

}  // namespace nlsv
