/// @file coupled.hpp
/// @brief Coupled particle/fluid time stepping with energy, mass and drag ledgers.
///
/// One step from t^n:
///   1. U_k = u^n(x_k) (mollified when lambda > 0);
///   2. drag force on the fluid, time-averaged over the exact relaxation,
///      F = sum_k w_k gamma(v_k) (v_k - U_k) (1 - e^{-dt}) / dt, deposited at x_k^n;
///   3. particles pushed with U frozen (positions frozen in the limit-kinetic mode);
///   4. Stokes step with F and the memory stress at t^n.
/// Because deposition is the adjoint of interpolation, the force the fluid receives equals
/// the momentum the particles lose up to wall-node contributions.

#pragma once

#include "nlsv/particles.hpp"
#include "nlsv/stokes.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <optional>

namespace nlsv {

struct EnergyReport {
    double fluid_ke = 0.0;        ///< (1/2) ||u||^2
    double particle_ke = 0.0;     ///< (1/2) sum w |v|^2
    double mass = 0.0;
    double second_moment = 0.0;
    double drag_dissipation_cum = 0.0;           ///< int int f |u - v|^2
    double weighted_drag_dissipation_cum = 0.0;  ///< int int f |u - v|^2 / (1 + |v|)^2
    double viscous_dissipation_cum = 0.0;        ///< int ||grad u||^2
    double drag_l1_cum = 0.0;                    ///< int_Q |int (u - v) f dv|
    double moment_integral_cum = 0.0;            ///< int (mass + second moment) dt
    double memory_credit_cum = 0.0;              ///< sum dt ||M||^2 / alpha

    /// mass + second moment + ||u||^2.
    double energy() const { return mass + second_moment + 2.0 * fluid_ke; }
    /// energy + 2 DragDiss + alpha ViscDiss.
    double ledger_total(double alpha) const {
        return energy() + 2.0 * drag_dissipation_cum + alpha * viscous_dissipation_cum;
    }
    /// Right-hand side of the drag L1 bound: sqrt(2) (moment integral)^{1/2} (weighted dissipation)^{1/2}.
    double drag_l1_bound() const {
        return std::sqrt(2.0) * std::sqrt(moment_integral_cum) * std::sqrt(weighted_drag_dissipation_cum);
    }
    bool finite_nonnegative() const;
};

/// Smooth test function for the weak formulation of the kinetic equation.
struct TestFunction {
    std::function<double(double t, Vec2 x, Vec2 v)> value;
    std::function<double(double t, Vec2 x, Vec2 v)> dt;
    std::function<Vec2(double t, Vec2 x, Vec2 v)> grad_x;
    std::function<Vec2(double t, Vec2 x, Vec2 v)> grad_v;
};

/// Throws StateError unless phi(T,.,.) = 0 and phi(t,x,v) = phi(t,x,v*) on the walls
/// (checked on a deterministic sample).
void check_admissible(const TestFunction& phi, double T, double Lx, double Ly);

/// Accumulates the particle-quadrature discretization of the weak form:
/// sum_n dt sum_k w_k [phi_t + eps v.grad_x phi + (U - v).grad_v phi](t_n, x_k, v_k)
/// + sum_k w_k^0 phi(0, x_k^0, v_k^0).
class WeakFormAccumulator {
public:
    WeakFormAccumulator(TestFunction phi, double eps) : phi_(std::move(phi)), eps_(eps) {}
    void initial(const ParticleEnsemble& ens);
    void accumulate(double t, double dt, const ParticleEnsemble& ens, const std::vector<Vec2>& U);
    double residual() const { return std::abs(sum_); }

private:
    TestFunction phi_;
    double eps_;
    double sum_ = 0.0;
};

/// One stored frame of a trajectory: particles and the fluid velocity they saw at t_n.
struct TrajectoryFrame {
    double t = 0.0;
    ParticleEnsemble particles;
    std::vector<Vec2> U;
};

/// Weak-form residual of a stored trajectory (frames at t_0..t_{N-1}, uniform dt).
double weak_form_residual(const std::vector<TrajectoryFrame>& frames, const TestFunction& phi, double eps,
                          double dt, double T);

struct StepDiagnostics {
    StepReport fluid;
    PushReport push;
    Vec2 force_on_fluid;         ///< dt * total deposited force (walls included)
    Vec2 particle_momentum_loss; ///< -(change of particle momentum)
    double fluid_energy_before = 0.0;
    double fluid_energy_after = 0.0;
};

struct CoupledOptions {
    double eps = 1.0;
    RegularizationParams reg;
    double alpha = 1.0;          ///< coercivity constant used in the ledger
    bool frozen_positions = false;  ///< limit-kinetic mode (dx/dt = 0)
};

/// Particles + fluid + memory history advanced together.
class CoupledSystem {
public:
    CoupledSystem(std::shared_ptr<StokesSolver> solver, VectorField u0, ParticleEnsemble particles,
                  CoupledOptions opts);

    StepDiagnostics step();
    void run(int steps, const std::function<void(const CoupledSystem&, const StepDiagnostics&)>& observer = {});

    const StokesState& fluid() const { return fluid_; }
    const ParticleEnsemble& particles() const { return particles_; }
    /// Gradient history (only recorded when the memory kernel is nonzero).
    const MemoryHistory& history() const { return hist_; }
    double time() const { return fluid_.t; }
    int steps_taken() const { return steps_; }
    const GridSpec& grid() const { return solver_->grid(); }
    const CoupledOptions& options() const { return opts_; }

    EnergyReport energy_ledger() const;
    void attach_weak_form(WeakFormAccumulator* acc);

private:
    std::shared_ptr<StokesSolver> solver_;
    StokesState fluid_;
    ParticleEnsemble particles_;
    MemoryHistory hist_;
    CoupledOptions opts_;
    EnergyReport cum_;
    int steps_ = 0;
    WeakFormAccumulator* weak_ = nullptr;
};

/// Limit-kinetic update: positions frozen, v <- U + (v - U) e^{-dt} with U = u0(x).
void mean_vlasov_step(ParticleEnsemble& ens, const VectorField& u0, double dt);

/// Fluid-only energy norm sum: ||u||^2 (interior nodes).
double fluid_energy(const VectorField& u);

/// L2 norm squared of a native memory stress (cell-area weighted, corner weights).
double stress_norm_sq(const GradientField& M);

}  // namespace nlsv
