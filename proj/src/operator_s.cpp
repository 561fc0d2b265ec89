#include "nlsv/operator_s.hpp"

#include <cmath>
#include <ostream>

namespace nlsv {

namespace {

double trapezoid_sum(std::size_t n, double dt, const auto& term) {
    if (n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        s += c * term(k);
    }
    return n == 1 ? 0.0 : dt * s;
}

}  // namespace

double l2q_norm_sq(const Trajectory& a, double dt) {
    return trapezoid_sum(a.size(), dt, [&](std::size_t k) { return l2_norm_sq(a[k]); });
}

double l2v_norm_sq(const Trajectory& a, double dt) {
    return trapezoid_sum(a.size(), dt, [&](std::size_t k) { return gradient_norm_sq(a[k]); });
}

double l2q_distance(const Trajectory& a, const Trajectory& b, double dt) {
    if (a.size() != b.size()) throw StateError("trajectory lengths differ");
    return std::sqrt(trapezoid_sum(a.size(), dt, [&](std::size_t k) {
        VectorField d = a[k];
        d -= b[k];
        return l2_norm_sq(d);
    }));
}

// ============================================================================
// OperatorS
// ============================================================================

OperatorS::OperatorS(SProblem problem) : prob_(std::move(problem)) {
    if (!prob_.solver) throw ConfigError("operator S needs a solver");
    prob_.reg.validate();
    if (prob_.steps <= 0) prob_.steps = prob_.solver->grid().steps();
}

Trajectory OperatorS::zero_trajectory() const {
    return Trajectory(prob_.steps + 1, VectorField(prob_.solver->grid()));
}

Trajectory OperatorS::apply(const Trajectory& w) const {
    StokesSolver& solver = *prob_.solver;
    const GridSpec& g = solver.grid();
    if (static_cast<int>(w.size()) != prob_.steps + 1) throw StateError("trajectory length does not match steps + 1");
    const double dt = g.dt;
    const double lam = prob_.reg.lambda;
    const double fac = -std::expm1(-dt) / dt;

    ParticleEnsemble ens = prob_.particles;
    StokesState st(g);
    st.u = prob_.u0;
    MemoryHistory whist = solver.start_history(w[0]);
    Trajectory out;
    out.reserve(w.size());
    out.push_back(st.u);

    for (int n = 0; n < prob_.steps; ++n) {
        const std::vector<Vec2> U = particle_velocity(ens, w[n], lam);
        std::vector<Vec2> q(ens.size());
        for (std::size_t k = 0; k < ens.size(); ++k) {
            const Vec2 v = ens.velocity(k);
            q[k] = (ens.w[k] * truncation(v, lam) * fac) * (v - U[k]);
        }
        const VectorField F = deposit_vectors(g, ens, q, lam);
        push_with_velocity(ens, U, prob_.eps, dt, g.Lx, g.Ly, std::min(g.dx(), g.dy()));
        if (solver.memory().is_zero()) {
            solver.step_with_stress(st, nullptr, F);
        } else {
            const GradientField M = solver.memory().convolve(whist, whist.latest_time());
            solver.step_with_stress(st, &M, F);
        }
        whist.append(velocity_gradient(w[n + 1]));
        out.push_back(st.u);
    }
    return out;
}

// ============================================================================
// Picard iteration
// ============================================================================

FixedPointResult fixed_point_solve(const OperatorS& S, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ConfigError("fixed point tolerance must be positive");
    const double dt = S.problem().solver->grid().dt;
    FixedPointResult res;
    res.trajectory = S.zero_trajectory();
    for (int k = 1; k <= max_iter; ++k) {
        Trajectory next = S.apply(res.trajectory);
        PicardLogEntry e;
        e.iter = k;
        e.residual = l2q_distance(next, res.trajectory, dt);
        e.energy = l2q_norm_sq(next, dt);
        res.log.push_back(e);
        res.trajectory = std::move(next);
        if (e.residual <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

void write_picard_log(std::ostream& os, const std::vector<PicardLogEntry>& log) {
    os << "iter,residual,energy\n";
    os.precision(17);
    for (const auto& e : log) os << e.iter << ',' << e.residual << ',' << e.energy << '\n';
}

}  // namespace nlsv
