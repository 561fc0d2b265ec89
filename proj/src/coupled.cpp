#include "nlsv/coupled.hpp"

#include "nlsv/interpolation.hpp"
#include "nlsv/viscous.hpp"

#include <cmath>

namespace nlsv {

bool EnergyReport::finite_nonnegative() const {
    const double v[] = {fluid_ke, particle_ke, mass, second_moment, drag_dissipation_cum,
                        weighted_drag_dissipation_cum, viscous_dissipation_cum, drag_l1_cum,
                        moment_integral_cum, memory_credit_cum};
    for (double x : v)
        if (!std::isfinite(x) || x < 0.0) return false;
    return true;
}

double fluid_energy(const VectorField& u) {
    return l2_norm_sq(u);
}

double stress_norm_sq(const GradientField& M) {
    const GridSpec& g = M.grid;
    double s = 0.0;
    for (std::size_t k = 0; k < M.dudx.size(); ++k) s += M.dudx[k] * M.dudx[k] + M.dvdy[k] * M.dvdy[k];
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const auto c = M.corner(i, j);
            s += corner_weight(g, i, j) * (M.dudy[c] * M.dudy[c] + M.dvdx[c] * M.dvdx[c]);
        }
    return s * g.cell_area();
}

// ============================================================================
// Weak form
// ============================================================================

void check_admissible(const TestFunction& phi, double T, double Lx, double Ly) {
    const double ts[] = {0.0, 0.3 * T, 0.7 * T};
    const double vs[] = {-2.5, -0.7, 0.0, 0.4, 1.9};
    const double ss[] = {0.0, 0.13, 0.5, 0.77, 1.0};
    auto check = [&](double t, Vec2 x, Vec2 v, Vec2 vstar) {
        const double a = phi.value(t, x, v), b = phi.value(t, x, vstar);
        if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a)))
            throw StateError("test function is not compatible with specular reflection");
    };
    for (double t : ts)
        for (double s : ss)
            for (double a : vs)
                for (double b : vs) {
                    const Vec2 v{a, b};
                    check(t, {0.0, s * Ly}, v, {-a, b});
                    check(t, {Lx, s * Ly}, v, {-a, b});
                    check(t, {s * Lx, 0.0}, v, {a, -b});
                    check(t, {s * Lx, Ly}, v, {a, -b});
                }
    for (double s : ss)
        for (double a : vs)
            for (double b : vs)
                if (phi.value(T, {s * Lx, 0.5 * Ly}, {a, b}) != 0.0 || phi.value(T, {0.5 * Lx, s * Ly}, {a, b}) != 0.0)
                    throw StateError("test function must vanish at the final time");
}

void WeakFormAccumulator::initial(const ParticleEnsemble& ens) {
    for (std::size_t k = 0; k < ens.size(); ++k) sum_ += ens.w[k] * phi_.value(0.0, ens.position(k), ens.velocity(k));
}

void WeakFormAccumulator::accumulate(double t, double dt, const ParticleEnsemble& ens, const std::vector<Vec2>& U) {
    double s = 0.0;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const Vec2 x = ens.position(k), v = ens.velocity(k);
        const double term = phi_.dt(t, x, v) + eps_ * dot(v, phi_.grad_x(t, x, v)) + dot(U[k] - v, phi_.grad_v(t, x, v));
        s += ens.w[k] * term;
    }
    sum_ += dt * s;
}

double weak_form_residual(const std::vector<TrajectoryFrame>& frames, const TestFunction& phi, double eps,
                          double dt, double T) {
    if (frames.empty()) return 0.0;
    (void)T;
    WeakFormAccumulator acc(phi, eps);
    acc.initial(frames.front().particles);
    for (const auto& f : frames) acc.accumulate(f.t, dt, f.particles, f.U);
    return acc.residual();
}

// ============================================================================
// CoupledSystem
// ============================================================================

CoupledSystem::CoupledSystem(std::shared_ptr<StokesSolver> solver, VectorField u0, ParticleEnsemble particles,
                             CoupledOptions opts)
    : solver_(std::move(solver)), particles_(std::move(particles)), opts_(opts) {
    opts_.reg.validate();
    fluid_ = StokesState(solver_->grid());
    fluid_.u = std::move(u0);
    hist_ = solver_->start_history(fluid_.u);
}

void CoupledSystem::attach_weak_form(WeakFormAccumulator* acc) {
    weak_ = acc;
    if (weak_) weak_->initial(particles_);
}

void mean_vlasov_step(ParticleEnsemble& ens, const VectorField& u0, double dt) {
    const std::vector<Vec2> U = particle_velocity(ens, u0);
    const double e = std::exp(-dt);
    for (std::size_t k = 0; k < ens.size(); ++k) {
        ens.vx[k] = U[k].x + (ens.vx[k] - U[k].x) * e;
        ens.vy[k] = U[k].y + (ens.vy[k] - U[k].y) * e;
    }
}

StepDiagnostics CoupledSystem::step() {
    const GridSpec& g = solver_->grid();
    const double dt = g.dt;
    const double lam = opts_.reg.lambda;
    StepDiagnostics diag;

    // Unmollified coupling shares one stencil between interpolation and deposition.
    const bool direct = !(lam > 0.0);
    const std::size_t np = particles_.size();
    std::vector<Vec2> U = direct ? std::vector<Vec2>(np) : particle_velocity(particles_, fluid_.u, lam);
    VectorField F(g);
    std::vector<Vec2> q(direct ? 0 : np);

    // Ledger increments over [t^n, t^{n+1}] with the particle state at t^n.
    ScalarField fx(g), fy(g);
    const StencilMap map(g);
    const double one_minus_e = -std::expm1(-dt);
    const double one_minus_e2 = -std::expm1(-2.0 * dt);
    Moments m0;
    double diss = 0.0, wdiss = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
        const Vec2 x = particles_.position(k);
        const Vec2 v = particles_.velocity(k);
        const double w = particles_.w[k];
        Bilinear sa, sb;
        if (direct) {
            if (!inside_closed(g, x)) throw DomainError("particle outside the domain");
            sa = map.u(x);
            sb = map.v(x);
            U[k] = interpolate_stencil(fluid_.u, sa, sb);
        }
        const Vec2 d = U[k] - v;
        const double gam = truncation(v, lam);
        const double d2 = dot(d, d);
        const double v2 = dot(v, v);
        m0.mass += w;
        m0.momentum = m0.momentum + w * v;
        m0.second_moment += w * v2;
        deposit_cell_vector(fx, fy, map, x, w * gam * d);
        diss += w * gam * d2;
        const double nv = 1.0 + std::sqrt(v2);
        wdiss += w * d2 / (nv * nv);
        const Vec2 qk = (w * gam * one_minus_e / dt) * (-1.0 * d);
        if (direct)
            deposit_stencil(F, sa, sb, qk, map.inv_area);
        else
            q[k] = qk;
    }
    if (!direct) F = deposit_vectors(g, particles_, q, lam);
    cum_.moment_integral_cum += dt * (m0.mass + m0.second_moment);
    double l1 = 0.0;
    for (std::size_t c = 0; c < fx.data().size(); ++c) l1 += std::hypot(fx.data()[c], fy.data()[c]);
    cum_.drag_l1_cum += dt * l1 * g.cell_area();
    cum_.weighted_drag_dissipation_cum += dt * wdiss;
    cum_.drag_dissipation_cum += 0.5 * one_minus_e2 * diss;
    if (weak_) weak_->accumulate(fluid_.t, dt, particles_, U);
    diag.force_on_fluid = dt * node_total(F);

    if (opts_.frozen_positions) {
        const double e = std::exp(-dt);
        for (std::size_t k = 0; k < particles_.size(); ++k) {
            particles_.vx[k] = U[k].x + (particles_.vx[k] - U[k].x) * e;
            particles_.vy[k] = U[k].y + (particles_.vy[k] - U[k].y) * e;
        }
    } else {
        diag.push = push_with_velocity(particles_, U, opts_.eps, dt, g.Lx, g.Ly, std::min(g.dx(), g.dy()));
    }
    const Moments m1 = moments(particles_);
    diag.particle_momentum_loss = m0.momentum - m1.momentum;

    diag.fluid_energy_before = fluid_energy(fluid_.u);
    if (solver_->memory().is_zero()) {
        diag.fluid = solver_->step_with_stress(fluid_, nullptr, F);
    } else {
        const GradientField M = solver_->memory().convolve(hist_, hist_.latest_time());
        cum_.memory_credit_cum += dt * stress_norm_sq(M) / opts_.alpha;
        diag.fluid = solver_->step_with_stress(fluid_, &M, F);
    }
    if (!solver_->memory().is_zero()) hist_.append(velocity_gradient(fluid_.u));
    diag.fluid_energy_after = fluid_energy(fluid_.u);
    cum_.viscous_dissipation_cum += dt * gradient_norm_sq(fluid_.u);
    ++steps_;
    return diag;
}

void CoupledSystem::run(int steps, const std::function<void(const CoupledSystem&, const StepDiagnostics&)>& observer) {
    for (int n = 0; n < steps; ++n) {
        const StepDiagnostics d = step();
        if (observer) observer(*this, d);
    }
}

EnergyReport CoupledSystem::energy_ledger() const {
    EnergyReport r = cum_;
    const Moments m = moments(particles_);
    r.fluid_ke = 0.5 * fluid_energy(fluid_.u);
    r.particle_ke = m.kinetic_energy;
    r.mass = m.mass;
    r.second_moment = m.second_moment;
    return r;
}

}  // namespace nlsv
