#include "nlsv/particles.hpp"

#include "nlsv/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <numeric>
#include <sstream>

namespace nlsv {

void ParticleEnsemble::reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    vx.reserve(n);
    vy.reserve(n);
    w.reserve(n);
}

void ParticleEnsemble::add(Vec2 pos, Vec2 vel, double weight) {
    x.push_back(pos.x);
    y.push_back(pos.y);
    vx.push_back(vel.x);
    vy.push_back(vel.y);
    w.push_back(weight);
}

Moments moments(const ParticleEnsemble& ens) {
    Moments m;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const double w = ens.w[k];
        const double v2 = ens.vx[k] * ens.vx[k] + ens.vy[k] * ens.vy[k];
        m.mass += w;
        m.momentum.x += w * ens.vx[k];
        m.momentum.y += w * ens.vy[k];
        m.second_moment += w * v2;
    }
    m.kinetic_energy = 0.5 * m.second_moment;
    return m;
}

double min_weight(const ParticleEnsemble& ens) {
    double m = 0.0;
    if (!ens.empty()) m = *std::min_element(ens.w.begin(), ens.w.end());
    return m;
}

// ============================================================================
// Regularization
// ============================================================================

void RegularizationParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0,1]");
    if (quad_points < 2) throw ConfigError("mollifier quadrature needs at least 2 points per dimension");
}

namespace {

double smooth_psi(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double raw_bump(double r2) {
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

}  // namespace

double truncation_profile(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double s = r - 1.0;
    const double a = smooth_psi(1.0 - s), b = smooth_psi(s);
    return a / (a + b);
}

double truncation(Vec2 v, double lambda) {
    if (lambda <= 0.0) return 1.0;
    return truncation_profile(lambda * norm(v));
}

double mollifier_normalization() {
    // integral over the unit disk of exp(-1/(1-r^2)) = 2 pi int_0^1 r exp(-1/(1-r^2)) dr,
    // composite Simpson in r (integrand vanishes smoothly at r = 1).
    static const double c = [] {
        const int n = 20000;
        const double h = 1.0 / n;
        double s = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double r = k * h;
            const double f = r * raw_bump(r * r);
            s += f * ((k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0));
        }
        return 1.0 / (2.0 * std::numbers::pi * s * h / 3.0);
    }();
    return c;
}

double mollifier(Vec2 z) {
    return mollifier_normalization() * raw_bump(dot(z, z));
}

MollifierQuadrature::MollifierQuadrature(int n) {
    double total = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Vec2 z{-1.0 + (a + 0.5) * 2.0 / n, -1.0 + (b + 0.5) * 2.0 / n};
            const double wt = mollifier(z);
            if (wt <= 0.0) continue;
            nodes.push_back(z);
            weights.push_back(wt);
            total += wt;
        }
    for (double& wt : weights) wt /= total;
}

PhaseDensity regularize_initial(const PhaseDensity& f0, const RegularizationParams& params, double Lx, double Ly) {
    params.validate();
    if (!params.active()) return f0;
    const double lam = params.lambda;
    auto quad = std::make_shared<MollifierQuadrature>(params.quad_points);
    return [f0, lam, quad, Lx, Ly](Vec2 x, Vec2 v) {
        const double g = truncation(v, lam);
        if (g == 0.0) return 0.0;
        double s = 0.0;
        for (std::size_t q = 0; q < quad->nodes.size(); ++q) {
            const Vec2 xq = x - lam * quad->nodes[q];
            if (xq.x < 0.0 || xq.x > Lx || xq.y < 0.0 || xq.y > Ly) continue;
            double inner = 0.0;
            for (std::size_t r = 0; r < quad->nodes.size(); ++r)
                inner += quad->weights[r] * f0(xq, v - lam * quad->nodes[r]);
            s += quad->weights[q] * inner;
        }
        return g * s;
    };
}

ParticleEnsemble init_from_density(const PhaseDensity& f0, const std::array<int, 4>& lattice, double vmax,
                                   double Lx, double Ly) {
    if (!(vmax > 0.0)) throw ConfigError("vmax must be positive");
    for (int n : lattice)
        if (n < 2) throw ConfigError("lattice counts must be >= 2 per dimension");
    const double hx = Lx / lattice[0], hy = Ly / lattice[1];
    const double hvx = 2.0 * vmax / lattice[2], hvy = 2.0 * vmax / lattice[3];
    const double vol = hx * hy * hvx * hvy;
    ParticleEnsemble ens;
    for (int i = 0; i < lattice[0]; ++i)
        for (int j = 0; j < lattice[1]; ++j)
            for (int a = 0; a < lattice[2]; ++a)
                for (int b = 0; b < lattice[3]; ++b) {
                    const Vec2 x{(i + 0.5) * hx, (j + 0.5) * hy};
                    const Vec2 v{-vmax + (a + 0.5) * hvx, -vmax + (b + 0.5) * hvy};
                    const double f = f0(x, v);
                    if (f < 0.0) throw ConfigError("initial density is negative at a lattice node");
                    if (f > 0.0) ens.add(x, v, f * vol);
                }
    return ens;
}

void thin_ensemble(ParticleEnsemble& ens, std::size_t max_count) {
    if (ens.size() <= max_count) return;
    std::vector<std::size_t> idx(ens.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(max_count), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         return ens.w[a] > ens.w[b] || (ens.w[a] == ens.w[b] && a < b);
                     });
    idx.resize(max_count);
    std::sort(idx.begin(), idx.end());
    ParticleEnsemble out;
    out.reserve(max_count);
    for (std::size_t k : idx) out.add(ens.position(k), ens.velocity(k), ens.w[k]);
    ens = std::move(out);
}

// ============================================================================
// Transport
// ============================================================================

Reflection specular_reflect(Vec2 x, Vec2 v, Wall wall, double Lx, double Ly) {
    switch (wall) {
        case Wall::Left: return {{-x.x, x.y}, {-v.x, v.y}};
        case Wall::Right: return {{2.0 * Lx - x.x, x.y}, {-v.x, v.y}};
        case Wall::Bottom: return {{x.x, -x.y}, {v.x, -v.y}};
        case Wall::Top: return {{x.x, 2.0 * Ly - x.y}, {v.x, -v.y}};
    }
    return {x, v};
}

int fold_into_box(double& x, double& y, double& vx, double& vy, double Lx, double Ly) {
    int n = 0;
    while (x < 0.0 || x > Lx) {
        x = (x < 0.0) ? -x : 2.0 * Lx - x;
        vx = -vx;
        ++n;
    }
    while (y < 0.0 || y > Ly) {
        y = (y < 0.0) ? -y : 2.0 * Ly - y;
        vy = -vy;
        ++n;
    }
    return n;
}

std::vector<Vec2> particle_velocity(const ParticleEnsemble& ens, const VectorField& u, double lambda) {
    const GridSpec& g = u.grid();
    const StencilMap map(g);
    std::vector<Vec2> U(ens.size());
    if (lambda <= 0.0) {
        for (std::size_t k = 0; k < ens.size(); ++k) {
            const Vec2 x = ens.position(k);
            if (!inside_closed(g, x)) throw DomainError("particle outside the domain");
            U[k] = interpolate_stencil(u, map.u(x), map.v(x));
        }
        return U;
    }
    static const MollifierQuadrature quad(6);
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const Vec2 x = ens.position(k);
        Vec2 s;
        for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
            const Vec2 xq = x - lambda * quad.nodes[q];
            if (!inside_closed(g, xq)) continue;
            s += quad.weights[q] * interpolate_stencil(u, map.u(xq), map.v(xq));
        }
        U[k] = s;
    }
    return U;
}

PushReport push_with_velocity(ParticleEnsemble& ens, const std::vector<Vec2>& U, double eps, double dt,
                              double Lx, double Ly, double h_min) {
    PushReport rep;
    const double e = std::exp(-dt);
    const double one_minus_e = -std::expm1(-dt);
    double vmax2 = 0.0;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const double ux = U[k].x, uy = U[k].y;
        if (!std::isfinite(ux) || !std::isfinite(uy))
            throw IntegrationError("non-finite fluid velocity at particle " + std::to_string(k));
        const double dx = ens.vx[k] - ux, dy = ens.vy[k] - uy;
        vmax2 = std::max(vmax2, ens.vx[k] * ens.vx[k] + ens.vy[k] * ens.vy[k]);
        ens.x[k] += eps * (ux * dt + dx * one_minus_e);
        ens.y[k] += eps * (uy * dt + dy * one_minus_e);
        ens.vx[k] = ux + dx * e;
        ens.vy[k] = uy + dy * e;
        rep.reflections += fold_into_box(ens.x[k], ens.y[k], ens.vx[k], ens.vy[k], Lx, Ly);
    }
    if (h_min > 0.0) {
        rep.cfl = eps * std::sqrt(vmax2) * dt / h_min;
        rep.cfl_ok = rep.cfl <= 1.0;
    }
    return rep;
}

PushReport push_particles(ParticleEnsemble& ens, const VectorField& u, double eps, double dt) {
    const GridSpec& g = u.grid();
    const std::vector<Vec2> U = particle_velocity(ens, u);
    return push_with_velocity(ens, U, eps, dt, g.Lx, g.Ly, std::min(g.dx(), g.dy()));
}

VectorField deposit_vectors(const GridSpec& g, const ParticleEnsemble& ens, const std::vector<Vec2>& q,
                            double lambda) {
    VectorField out(g);
    const StencilMap map(g);
    if (lambda <= 0.0) {
        for (std::size_t k = 0; k < ens.size(); ++k) {
            const Vec2 x = ens.position(k);
            deposit_stencil(out, map.u(x), map.v(x), q[k], map.inv_area);
        }
        return out;
    }
    static const MollifierQuadrature quad(6);
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const Vec2 x = ens.position(k);
        for (std::size_t m = 0; m < quad.nodes.size(); ++m) {
            const Vec2 xq = x - lambda * quad.nodes[m];
            if (!inside_closed(g, xq)) continue;
            deposit_stencil(out, map.u(xq), map.v(xq), quad.weights[m] * q[k], map.inv_area);
        }
    }
    return out;
}

VectorField deposit_drag(const ParticleEnsemble& ens, const VectorField& u) {
    const std::vector<Vec2> U = particle_velocity(ens, u);
    std::vector<Vec2> q(ens.size());
    for (std::size_t k = 0; k < ens.size(); ++k) q[k] = -ens.w[k] * (U[k] - ens.velocity(k));
    return deposit_vectors(u.grid(), ens, q);
}

ScalarField density_field(const GridSpec& g, const ParticleEnsemble& ens) {
    ScalarField rho(g);
    for (std::size_t k = 0; k < ens.size(); ++k) deposit_cell_density(rho, ens.position(k), ens.w[k]);
    return rho;
}

// ============================================================================
// Phase volume
// ============================================================================

double det4(std::array<std::array<double, 4>, 4> m) {
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

double phase_volume(const std::array<PhasePoint, 5>& s) {
    std::array<std::array<double, 4>, 4> m{};
    double scale = 1.0;
    for (int r = 0; r < 4; ++r) {
        double len = 0.0;
        for (int c = 0; c < 4; ++c) {
            m[r][c] = s[r + 1][c] - s[0][c];
            len += m[r][c] * m[r][c];
        }
        scale *= std::sqrt(len);
    }
    const double d = std::abs(det4(m));
    if (scale == 0.0 || d <= 1e-14 * scale) return 0.0;
    return d / 24.0;
}

}  // namespace nlsv
