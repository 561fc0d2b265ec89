#include "nlsv/stokes.hpp"

#include "nlsv/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace nlsv {

// ============================================================================
// MemoryKernel
// ============================================================================

MemoryKernel MemoryKernel::zero() {
    return MemoryKernel{};
}

MemoryKernel MemoryKernel::from_coefficient(const OscillatoryCoefficient& A1, const GridSpec& g, double eps) {
    MemoryKernel k;
    if (A1.is_zero) return k;
    k.zero_ = false;
    k.grid_ = g;
    k.cache_ = std::make_shared<Cache>();
    if (A1.separable()) {
        k.factor_ = A1.time_factor;
        k.base_ = std::make_shared<const ViscousOperator>(g, sample_cells_spatial(A1, g, eps));
    }
    k.at_time_ = [A1, g, eps](double t) {
        return std::make_shared<const ViscousOperator>(g, sample_cells(A1, g, t, eps));
    };
    return k;
}

MemoryKernel MemoryKernel::from_sequence(const GridSpec& g, std::vector<Tensor4> seq, double dt_seq) {
    MemoryKernel k;
    bool all_zero = true;
    for (const auto& C : seq)
        for (double x : C.c) all_zero = all_zero && x == 0.0;
    if (seq.empty() || all_zero) return k;
    k.zero_ = false;
    k.grid_ = g;
    k.cache_ = std::make_shared<Cache>();
    auto s = std::make_shared<std::vector<Tensor4>>(std::move(seq));
    k.at_time_ = [s, dt_seq, g](double t) {
        const double r = t / dt_seq;
        const std::size_t last = s->size() - 1;
        Tensor4 C;
        if (r >= static_cast<double>(last)) {
            C = (*s)[last];
        } else {
            const auto n0 = static_cast<std::size_t>(std::max(0.0, std::floor(r)));
            const double th = r - static_cast<double>(n0);
            C = (1.0 - th) * (*s)[n0] + th * (*s)[n0 + 1];
        }
        return std::make_shared<const ViscousOperator>(g, C);
    };
    return k;
}

MemoryKernel MemoryKernel::separable_uniform(const GridSpec& g, std::function<double(double)> f, const Tensor4& C) {
    MemoryKernel k;
    k.zero_ = false;
    k.grid_ = g;
    k.cache_ = std::make_shared<Cache>();
    k.factor_ = f;
    k.base_ = std::make_shared<const ViscousOperator>(g, C);
    k.at_time_ = [g, f, C](double t) { return std::make_shared<const ViscousOperator>(g, f(t) * C); };
    return k;
}

std::shared_ptr<const ViscousOperator> MemoryKernel::at_lag(int lag, double dt) const {
    if (zero_) return std::make_shared<const ViscousOperator>(grid_, Tensor4{});
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->ops.find(lag);
    if (it != cache_->ops.end()) return it->second;
    auto op = at_time_(lag * dt);
    cache_->ops.emplace(lag, op);
    return op;
}

GradientField MemoryKernel::convolve(const MemoryHistory& hist, double t) const {
    const GridSpec& g = hist.grid();
    GradientField M(g);
    if (hist.size() == 0) throw StateError("memory convolution on an empty history");
    const double dt = hist.dt();
    const int n = static_cast<int>(hist.size()) - 1;
    if (std::abs(t - n * dt) > 1e-9 * std::max(1.0, std::abs(t)))
        throw StateError("memory history ends at t=" + std::to_string(n * dt) + " but t=" + std::to_string(t));
    if (zero_ || n == 0) return M;
    auto weight = [&](int m) { return (m == 0 || m == n) ? 0.5 * dt : dt; };
    if (base_) {
        GradientField sum(g);
        for (int m = 0; m <= n; ++m) sum.axpy(weight(m) * factor_((n - m) * dt), hist[m]);
        return base_->stress(sum);
    }
    for (int m = 0; m <= n; ++m) {
        const auto op = at_lag(n - m, dt);
        M.axpy(weight(m), op->stress(hist[m]));
    }
    return M;
}

TensorField memory_convolution(const MemoryHistory& hist, const OscillatoryCoefficient& A1, double t, double eps) {
    const MemoryKernel k = MemoryKernel::from_coefficient(A1, hist.grid(), eps);
    return stress_to_cells(k.convolve(hist, t));
}

// ============================================================================
// StokesSolver
// ============================================================================

StokesSolver::StokesSolver(const GridSpec& g, const OscillatoryCoefficient& A0, MemoryKernel A1, double eps,
                           SolverOptions opts)
    : grid_(g), A0_(A0), fine_(true), eps_(eps), A1_(std::move(A1)), opts_(opts), projector_(g),
      pre_u_(g.nx - 1, g.dx(), g.ny, g.dy(), true), pre_v_(g.ny - 1, g.dy(), g.nx, g.dx(), false) {
    K_ = ViscousOperator(g, sample_cells(A0_, g, 0.0, eps_));
    K_time_ = 0.0;
}

StokesSolver::StokesSolver(const GridSpec& g, ViscousOperator K, MemoryKernel A1, SolverOptions opts)
    : grid_(g), fine_(false), A1_(std::move(A1)), opts_(opts), K_(std::move(K)), K_time_(0.0), projector_(g),
      pre_u_(g.nx - 1, g.dx(), g.ny, g.dy(), true), pre_v_(g.ny - 1, g.dy(), g.nx, g.dx(), false) {}

const ViscousOperator& StokesSolver::viscous(double t) {
    if (fine_ && A0_.time_dependent && t != K_time_) {
        K_ = ViscousOperator(grid_, sample_cells(A0_, grid_, t, eps_));
        K_time_ = t;
    }
    return K_;
}

MemoryHistory StokesSolver::start_history(const VectorField& u0) const {
    MemoryHistory h(grid_, grid_.dt);
    h.append(velocity_gradient(u0));
    return h;
}

VectorField StokesSolver::precondition(const VectorField& r, double sigma, double tau_abar) {
    const int nx = grid_.nx, ny = grid_.ny;
    VectorField z(grid_);
    scratch_u_.resize(static_cast<std::size_t>(ny) * (nx - 1));
    for (int jj = 1; jj <= ny; ++jj)
        for (int i = 1; i < nx; ++i) scratch_u_[static_cast<std::size_t>(jj - 1) * (nx - 1) + (i - 1)] = r.u(i, jj);
    pre_u_.solve(scratch_u_, sigma, tau_abar);
    for (int jj = 1; jj <= ny; ++jj)
        for (int i = 1; i < nx; ++i) z.u(i, jj) = scratch_u_[static_cast<std::size_t>(jj - 1) * (nx - 1) + (i - 1)];
    scratch_v_.resize(static_cast<std::size_t>(ny - 1) * nx);
    for (int j = 1; j < ny; ++j)
        for (int ii = 1; ii <= nx; ++ii) scratch_v_[static_cast<std::size_t>(j - 1) * nx + (ii - 1)] = r.v(ii, j);
    pre_v_.solve(scratch_v_, sigma, tau_abar);
    for (int j = 1; j < ny; ++j)
        for (int ii = 1; ii <= nx; ++ii) z.v(ii, j) = scratch_v_[static_cast<std::size_t>(j - 1) * nx + (ii - 1)];
    projector_.project(z);
    return z;
}

PcgResult StokesSolver::solve_shifted(const VectorField& b, VectorField& x, double sigma, double tau, double t) {
    const ViscousOperator& K = viscous(t);
    const double tau_abar = tau * K.mean_diffusivity();
    auto apply_a = [&](const VectorField& y) {
        VectorField ky = K.apply(y);
        projector_.project(ky);
        ky *= tau;
        ky.axpy(sigma, y);
        return ky;
    };
    auto apply_m = [&](const VectorField& r) { return precondition(r, sigma, tau_abar); };
    auto dot = [](const VectorField& a, const VectorField& c) { return inner_product(a, c); };
    const int max_iter = opts_.max_iter_factor * grid_.nx * grid_.ny;
    return pcg(apply_a, apply_m, dot, b, x, opts_.tol, max_iter, "Stokes solve");
}

StepReport StokesSolver::step_with_stress(StokesState& state, const GradientField* M, const VectorField& F) {
    const double dt = grid_.dt;
    VectorField rhs = state.u;
    rhs.axpy(dt, F);
    if (M) rhs.axpy(-dt, gradient_transpose(*M));
    rhs.zero_boundary();
    VectorField b = rhs;
    projector_.project(b);

    VectorField x = state.u;
    x.zero_boundary();
    projector_.project(x);
    const double t_new = state.t + dt;
    const PcgResult pr = solve_shifted(b, x, 1.0, dt, t_new);

    // Pressure: the residual of the unconstrained system is dt * grad p.
    VectorField r = rhs;
    r.axpy(-1.0, x);
    r.axpy(-dt, viscous(t_new).apply(x));
    r.zero_boundary();
    ScalarField phi = projector_.project(r);
    for (double& v : phi.data()) v /= dt;

    state.u = std::move(x);
    state.p = std::move(phi);
    state.t = t_new;

    StepReport rep;
    rep.iterations = pr.iterations;
    rep.relative_residual = pr.relative_residual;
    rep.max_divergence = max_abs_divergence(state.u);
    rep.pressure_mean = state.p.mean();
    return rep;
}

StepReport StokesSolver::step(StokesState& state, const MemoryHistory& hist, const VectorField& F) {
    if (A1_.is_zero()) return step_with_stress(state, nullptr, F);
    const GradientField M = A1_.convolve(hist, state.t);
    return step_with_stress(state, &M, F);
}

StepReport StokesSolver::advance(StokesState& state, MemoryHistory& hist, const VectorField& F) {
    if (hist.size() == 0 || std::abs(hist.latest_time() - state.t) > 1e-9 * std::max(1.0, state.t))
        throw StateError("memory history is out of sync with the fluid clock");
    const StepReport rep = step(state, hist, F);
    hist.append(velocity_gradient(state.u));
    return rep;
}

VectorField StokesSolver::solve_steady(const VectorField& f, StepReport* report) {
    VectorField b = f;
    b.zero_boundary();
    projector_.project(b);
    VectorField x(grid_);
    const PcgResult pr = solve_shifted(b, x, 0.0, 1.0, K_time_);
    if (report) {
        report->iterations = pr.iterations;
        report->relative_residual = pr.relative_residual;
        report->max_divergence = max_abs_divergence(x);
    }
    return x;
}

}  // namespace nlsv
