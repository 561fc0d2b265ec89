#include "nlsv/cell_problem.hpp"

#include "nlsv/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nlsv {

// ============================================================================
// PeriodicVector / PeriodicGradient
// ============================================================================

PeriodicVector& PeriodicVector::axpy(double a, const PeriodicVector& o) {
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] += a * o.u[k];
        v[k] += a * o.v[k];
    }
    return *this;
}

PeriodicVector& PeriodicVector::operator*=(double s) {
    for (auto& x : u) x *= s;
    for (auto& x : v) x *= s;
    return *this;
}

double PeriodicVector::max_abs() const {
    double r = 0.0;
    for (double x : u) r = std::max(r, std::abs(x));
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

Vec2 PeriodicVector::mean() const {
    Vec2 s;
    for (std::size_t k = 0; k < u.size(); ++k) {
        s.x += u[k];
        s.y += v[k];
    }
    return (1.0 / static_cast<double>(u.size())) * s;
}

double dot(const PeriodicVector& a, const PeriodicVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.u.size(); ++k) s += a.u[k] * b.u[k] + a.v[k] * b.v[k];
    return s;
}

PeriodicGradient::PeriodicGradient(int n) : m(n) {
    for (auto& c : g) c.assign(static_cast<std::size_t>(n) * n, 0.0);
}

PeriodicGradient PeriodicGradient::uniform(int n, const Mat2& xi) {
    PeriodicGradient G(n);
    const auto f = xi.flat();
    for (int a = 0; a < 4; ++a) std::fill(G.g[a].begin(), G.g[a].end(), f[a]);
    return G;
}

PeriodicGradient& PeriodicGradient::axpy(double a, const PeriodicGradient& o) {
    for (int c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < g[c].size(); ++k) g[c][k] += a * o.g[c][k];
    return *this;
}

Mat2 PeriodicGradient::mean() const {
    std::array<double, 4> f{};
    for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (double x : g[c]) s += x;
        f[c] = s / static_cast<double>(g[c].size());
    }
    return Mat2::from_flat(f);
}

PeriodicGradient periodic_gradient(const PeriodicVector& w) {
    const int m = w.m;
    const double ih = static_cast<double>(m);
    PeriodicGradient G(m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t c = w.idx(i, j);
            G.g[0][c] = (w.u[w.idx(i + 1, j)] - w.u[c]) * ih;
            G.g[3][c] = (w.v[w.idx(i, j + 1)] - w.v[c]) * ih;
            G.g[1][c] = (w.u[c] - w.u[w.idx(i, j - 1)]) * ih;
            G.g[2][c] = (w.v[c] - w.v[w.idx(i - 1, j)]) * ih;
        }
    return G;
}

PeriodicVector periodic_gradient_transpose(const PeriodicGradient& S) {
    const int m = S.m;
    const double ih = static_cast<double>(m);
    PeriodicVector out(m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t c = out.idx(i, j);
            out.u[c] = (S.g[0][out.idx(i - 1, j)] - S.g[0][c]) * ih + (S.g[1][c] - S.g[1][out.idx(i, j + 1)]) * ih;
            out.v[c] = (S.g[3][out.idx(i, j - 1)] - S.g[3][c]) * ih + (S.g[2][c] - S.g[2][out.idx(i + 1, j)]) * ih;
        }
    return out;
}

std::vector<double> periodic_divergence(const PeriodicVector& w) {
    const int m = w.m;
    const double ih = static_cast<double>(m);
    std::vector<double> d(static_cast<std::size_t>(m) * m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t c = w.idx(i, j);
            d[c] = (w.u[w.idx(i + 1, j)] - w.u[c] + w.v[w.idx(i, j + 1)] - w.v[c]) * ih;
        }
    return d;
}

// ============================================================================
// PeriodicViscous
// ============================================================================

PeriodicViscous::PeriodicViscous(int m, std::vector<Tensor4> cells) : m_(m), cells_(std::move(cells)) {
    if (static_cast<int>(cells_.size()) != m * m) throw ConfigError("periodic viscous operator: wrong cell count");
    for (auto& C : cells_) {
        Tensor4 s;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) s(a, b) = 0.5 * (C(a, b) + C(b, a));
        C = s;
    }
    PeriodicVector ix(m);
    corner_.assign(cells_.size(), {0.0, 0.0, 0.0, 0.0});
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            auto& w = corner_[ix.idx(i, j)];
            for (int cj = j - 1; cj <= j; ++cj)
                for (int ci = i - 1; ci <= i; ++ci) {
                    const Tensor4& C = cells_[ix.idx(ci, cj)];
                    w[0] += 0.25 * C(1, 1);
                    w[1] += 0.25 * C(1, 2);
                    w[2] += 0.25 * C(2, 1);
                    w[3] += 0.25 * C(2, 2);
                }
        }
}

PeriodicGradient PeriodicViscous::stress(const PeriodicGradient& G) const {
    const int m = m_;
    PeriodicVector ix(m);
    PeriodicGradient S(m);
    std::vector<double> t1(cells_.size()), t2(cells_.size());
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t c = ix.idx(i, j);
            const std::size_t n00 = c, n10 = ix.idx(i + 1, j), n01 = ix.idx(i, j + 1), n11 = ix.idx(i + 1, j + 1);
            const Tensor4& C = cells_[c];
            const double g0 = G.g[0][c], g3 = G.g[3][c];
            const double g1 = 0.25 * (G.g[1][n00] + G.g[1][n10] + G.g[1][n01] + G.g[1][n11]);
            const double g2 = 0.25 * (G.g[2][n00] + G.g[2][n10] + G.g[2][n01] + G.g[2][n11]);
            S.g[0][c] = C(0, 0) * g0 + C(0, 3) * g3 + C(0, 1) * g1 + C(0, 2) * g2;
            S.g[3][c] = C(3, 0) * g0 + C(3, 3) * g3 + C(3, 1) * g1 + C(3, 2) * g2;
            t1[c] = C(1, 0) * g0 + C(1, 3) * g3;
            t2[c] = C(2, 0) * g0 + C(2, 3) * g3;
        }
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t n = ix.idx(i, j);
            const auto& w = corner_[n];
            const std::size_t a = ix.idx(i - 1, j - 1), b = ix.idx(i, j - 1), c = ix.idx(i - 1, j), d = n;
            S.g[1][n] = w[0] * G.g[1][n] + w[1] * G.g[2][n] + 0.25 * (t1[a] + t1[b] + t1[c] + t1[d]);
            S.g[2][n] = w[2] * G.g[1][n] + w[3] * G.g[2][n] + 0.25 * (t2[a] + t2[b] + t2[c] + t2[d]);
        }
    return S;
}

PeriodicVector PeriodicViscous::apply(const PeriodicVector& w) const {
    return periodic_gradient_transpose(stress(periodic_gradient(w)));
}

double PeriodicViscous::mean_diffusivity() const {
    double s = 0.0;
    for (const auto& C : cells_) s += 0.25 * (C(0, 0) + C(1, 1) + C(2, 2) + C(3, 3));
    return s / static_cast<double>(cells_.size());
}

Tensor4 PeriodicViscous::mean_tensor() const {
    Tensor4 M;
    for (const auto& C : cells_) M += C;
    M *= 1.0 / static_cast<double>(cells_.size());
    return M;
}

// ============================================================================
// PeriodicProjector
// ============================================================================

PeriodicProjector::PeriodicProjector(int m) : m_(m), poisson_(m, 1.0 / m) {}

std::vector<double> PeriodicProjector::project(PeriodicVector& w) {
    std::vector<double> phi = periodic_divergence(w);
    for (auto& x : phi) x = -x;
    poisson_.solve(phi, 0.0, 1.0);
    const double ih = static_cast<double>(m_);
    for (int j = 0; j < m_; ++j)
        for (int i = 0; i < m_; ++i) {
            const std::size_t c = w.idx(i, j);
            w.u[c] -= (phi[c] - phi[w.idx(i - 1, j)]) * ih;
            w.v[c] -= (phi[c] - phi[w.idx(i, j - 1)]) * ih;
        }
    return phi;
}

// ============================================================================
// Cell problem
// ============================================================================

void CellProblemSpec::validate() const {
    if (n_cell < 4) throw ConfigError("cell grid needs at least 4 cells per direction");
    if (!(alpha > 0.0)) throw ConfigError("cell problem needs a positive coercivity constant");
    if (!A0.eval) throw ConfigError("cell problem needs an A0 coefficient");
}

std::vector<Tensor4> sample_cell_tensors(const OscillatoryCoefficient& A, double t, Vec2 x0, int m) {
    std::vector<Tensor4> out(static_cast<std::size_t>(m) * m);
    const double h = 1.0 / m;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            out[static_cast<std::size_t>(j) * m + i] = Tensor4::from_matrix(A.eval(t, x0, {(i + 0.5) * h, (j + 0.5) * h}));
    return out;
}

namespace {

void remove_mean(PeriodicVector& w) {
    const Vec2 mu = w.mean();
    for (auto& x : w.u) x -= mu.x;
    for (auto& x : w.v) x -= mu.y;
}

/// Solves P G^T S0 G chi = P rhs for chi in the zero-mean divergence-free space.
CellSolution solve_with_rhs(const PeriodicViscous& K0, PeriodicVector rhs, double tol) {
    const int m = K0.m();
    PeriodicProjector proj(m);
    PeriodicHelmholtz pre(m, 1.0 / m);
    const double abar = K0.mean_diffusivity();
    PeriodicVector raw = rhs;
    proj.project(rhs);
    remove_mean(rhs);

    auto apply_a = [&](const PeriodicVector& x) {
        PeriodicVector y = K0.apply(x);
        proj.project(y);
        remove_mean(y);
        return y;
    };
    auto apply_m = [&](const PeriodicVector& r) {
        PeriodicVector z = r;
        pre.solve(z.u, 0.0, abar);
        pre.solve(z.v, 0.0, abar);
        proj.project(z);
        remove_mean(z);
        return z;
    };
    auto dotf = [](const PeriodicVector& a, const PeriodicVector& b) { return dot(a, b); };

    CellSolution sol;
    sol.chi = PeriodicVector(m);
    // The tolerance is measured against the unprojected load so that loads whose
    // divergence-free part vanishes up to roundoff give chi = 0.
    const double scale = std::sqrt(dot(raw, raw));
    const double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm > tol * scale) {
        const double rel = tol * std::max(1.0, scale / bnorm);
        const PcgResult r = pcg(apply_a, apply_m, dotf, rhs, sol.chi, rel, 20 * m * m, "cell problem");
        remove_mean(sol.chi);
        sol.iterations = r.iterations;
    }

    // Residual of the momentum equation; its gradient part is the pressure.
    PeriodicVector res = raw;
    res.axpy(-1.0, K0.apply(sol.chi));
    sol.p = proj.project(res);
    sol.relative_residual = scale > 0.0 ? std::sqrt(dot(res, res)) / scale : std::sqrt(dot(res, res));
    return sol;
}

PeriodicVector load_rhs(const PeriodicViscous& K, const PeriodicGradient& H) {
    PeriodicVector b = periodic_gradient_transpose(K.stress(H));
    b *= -1.0;
    return b;
}

}  // namespace

CellSolution solve_cell_problem(const CellProblemSpec& spec, const Mat2& xi) {
    spec.validate();
    const int m = spec.n_cell;
    const PeriodicViscous K0(m, sample_cell_tensors(spec.A0, 0.0, spec.x0, m));
    return solve_with_rhs(K0, load_rhs(K0, PeriodicGradient::uniform(m, xi)), spec.tol);
}

namespace {

Mat2 basis(int b) {
    std::array<double, 4> f{};
    f[b] = 1.0;
    return Mat2::from_flat(f);
}

double periodic_bilinear(const std::vector<double>& a, int m, double gx, double gy) {
    const double fx = std::floor(gx), fy = std::floor(gy);
    const double sx = gx - fx, sy = gy - fy;
    const int i0 = static_cast<int>(fx), j0 = static_cast<int>(fy);
    auto at = [&](int i, int j) {
        const int ii = ((i % m) + m) % m, jj = ((j % m) + m) % m;
        return a[static_cast<std::size_t>(jj) * m + ii];
    };
    return (1 - sx) * (1 - sy) * at(i0, j0) + sx * (1 - sy) * at(i0 + 1, j0) + (1 - sx) * sy * at(i0, j0 + 1) +
           sx * sy * at(i0 + 1, j0 + 1);
}

}  // namespace

Vec2 Corrector::evaluate(const Mat2& xi, Vec2 y) const {
    const auto f = xi.flat();
    Vec2 out;
    for (int b = 0; b < 4; ++b) {
        if (f[b] == 0.0) continue;
        // u nodes at (i, j + 1/2), v nodes at (i + 1/2, j) in cell units.
        out.x += f[b] * periodic_bilinear(chi[b].u, m, y.x * m, y.y * m - 0.5);
        out.y += f[b] * periodic_bilinear(chi[b].v, m, y.x * m - 0.5, y.y * m);
    }
    return out;
}

double Corrector::max_abs() const {
    double r = 0.0;
    for (const auto& c : chi) r = std::max(r, c.max_abs());
    return r;
}

Corrector compute_correctors(const CellProblemSpec& spec, int workers) {
    spec.validate();
    const int m = spec.n_cell;
    const PeriodicViscous K0(m, sample_cell_tensors(spec.A0, 0.0, spec.x0, m));
    Corrector corr;
    corr.m = m;
    std::array<CellSolution, 4> sols;
    auto solve_b = [&](int b) {
        sols[b] = solve_with_rhs(K0, load_rhs(K0, PeriodicGradient::uniform(m, basis(b))), spec.tol);
    };
    if (workers > 1) {
        std::vector<std::thread> threads;
        for (int b = 0; b < 4; ++b) threads.emplace_back(solve_b, b);
        for (auto& t : threads) t.join();
    } else {
        for (int b = 0; b < 4; ++b) solve_b(b);
    }
    for (int b = 0; b < 4; ++b) {
        corr.chi[b] = std::move(sols[b].chi);
        corr.p[b] = std::move(sols[b].p);
        corr.residual[b] = sols[b].relative_residual;
    }
    return corr;
}

namespace {

Tensor4 averaged_response(const PeriodicViscous& K, const Corrector& corr) {
    Tensor4 C;
    for (int b = 0; b < 4; ++b) {
        PeriodicGradient H = PeriodicGradient::uniform(corr.m, basis(b));
        H.axpy(1.0, periodic_gradient(corr.chi[b]));
        const auto col = K.stress(H).mean().flat();
        for (int a = 0; a < 4; ++a) C(a, b) = col[a];
    }
    return C;
}

}  // namespace

Tensor4 effective_C0(const CellProblemSpec& spec, const Corrector& corr) {
    const PeriodicViscous K0(corr.m, sample_cell_tensors(spec.A0, 0.0, spec.x0, corr.m));
    return averaged_response(K0, corr);
}

Tensor4 mean_coefficient(const CellProblemSpec& spec) {
    return PeriodicViscous(spec.n_cell, sample_cell_tensors(spec.A0, 0.0, spec.x0, spec.n_cell)).mean_tensor();
}

std::vector<Tensor4> effective_C1(const CellProblemSpec& spec, const Corrector& corr, double dt, int steps) {
    std::vector<Tensor4> out(static_cast<std::size_t>(steps) + 1);
    if (spec.A1.is_zero || !spec.A1.eval) return out;
    if (spec.A1.separable()) {
        std::vector<Tensor4> cells(static_cast<std::size_t>(corr.m) * corr.m);
        const double h = 1.0 / corr.m;
        for (int j = 0; j < corr.m; ++j)
            for (int i = 0; i < corr.m; ++i)
                cells[static_cast<std::size_t>(j) * corr.m + i] =
                    Tensor4::from_matrix(spec.A1.spatial(spec.x0, {(i + 0.5) * h, (j + 0.5) * h}));
        const Tensor4 base = averaged_response(PeriodicViscous(corr.m, std::move(cells)), corr);
        for (int n = 0; n <= steps; ++n) out[n] = spec.A1.time_factor(n * dt) * base;
        return out;
    }
    for (int n = 0; n <= steps; ++n)
        out[n] = averaged_response(PeriodicViscous(corr.m, sample_cell_tensors(spec.A1, n * dt, spec.x0, corr.m)), corr);
    return out;
}

std::vector<Mat2> volterra_impulse_response(const CellProblemSpec& spec, const Mat2& xi, double dt, int steps) {
    spec.validate();
    const int m = spec.n_cell;
    const PeriodicViscous K0(m, sample_cell_tensors(spec.A0, 0.0, spec.x0, m));
    const bool memory = !spec.A1.is_zero && static_cast<bool>(spec.A1.eval);
    std::vector<std::unique_ptr<PeriodicViscous>> K1;  // A1 at lag l, built lazily
    auto kernel_at = [&](int lag) -> const PeriodicViscous& {
        if (static_cast<int>(K1.size()) <= lag) K1.resize(lag + 1);
        if (!K1[lag]) K1[lag] = std::make_unique<PeriodicViscous>(m, sample_cell_tensors(spec.A1, lag * dt, spec.x0, m));
        return *K1[lag];
    };

    std::vector<PeriodicGradient> H;  // xi_m + grad chi^m
    std::vector<Mat2> sigma;
    for (int n = 0; n <= steps; ++n) {
        const Mat2 xin = n == 0 ? xi : Mat2{};
        PeriodicGradient mem(m);
        if (memory)
            for (int k = 0; k < n; ++k) {
                const double c = (k == 0 ? 0.5 : 1.0) * dt;
                mem.axpy(c, kernel_at(n - k).stress(H[k]));
            }
        const PeriodicGradient E = PeriodicGradient::uniform(m, xin);
        PeriodicVector rhs = load_rhs(K0, E);
        rhs.axpy(-1.0, periodic_gradient_transpose(mem));
        const CellSolution sol = solve_with_rhs(K0, rhs, spec.tol);
        PeriodicGradient Hn = E;
        Hn.axpy(1.0, periodic_gradient(sol.chi));
        PeriodicGradient total = K0.stress(Hn);
        total.axpy(1.0, mem);
        sigma.push_back(total.mean());
        H.push_back(std::move(Hn));
    }
    return sigma;
}

std::vector<Mat2> impulse_kernel(const std::vector<Mat2>& sigma, double dt) {
    std::vector<Mat2> k(sigma.size());
    for (std::size_t n = 1; n < sigma.size(); ++n) k[n] = (2.0 / dt) * sigma[n];
    return k;
}

double quadratic_form(const Tensor4& C, const Mat2& xi, const Mat2& eta) {
    return inner(C.apply(xi), eta);
}

}  // namespace nlsv
