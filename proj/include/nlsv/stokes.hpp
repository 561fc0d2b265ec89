/// @file stokes.hpp
/// @brief Time-dependent Stokes solver with an oscillatory instantaneous viscosity and a
/// Volterra memory viscosity, on the MAC box grid with no-slip walls.
///
/// One step solves, inside the discrete divergence-free space V_h,
///     (I + dt K) u^{n+1} = P [u^n + dt (F - G^T M^n)],
/// where K is the instantaneous viscous operator at t^{n+1}, M^n the trapezoidal memory
/// stress at t^n and P the Leray projector. The pressure is recovered from the gradient
/// part of the residual.

#pragma once

#include "nlsv/coefficient.hpp"
#include "nlsv/fields.hpp"
#include "nlsv/krylov.hpp"
#include "nlsv/projection.hpp"
#include "nlsv/transforms.hpp"
#include "nlsv/viscous.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace nlsv {

struct StokesState {
    VectorField u;
    ScalarField p;
    double t = 0.0;

    StokesState() = default;
    explicit StokesState(const GridSpec& g) : u(g), p(g) {}
};

/// Stored velocity gradients at t_0 .. t_n (native MAC locations).
class MemoryHistory {
public:
    MemoryHistory() = default;
    MemoryHistory(const GridSpec& g, double dt) : grid_(g), dt_(dt) {}

    void append(GradientField G) { snaps_.push_back(std::move(G)); }
    std::size_t size() const { return snaps_.size(); }
    const GradientField& operator[](std::size_t m) const { return snaps_[m]; }
    double dt() const { return dt_; }
    const GridSpec& grid() const { return grid_; }
    /// Time of the latest snapshot.
    double latest_time() const { return snaps_.empty() ? 0.0 : (snaps_.size() - 1) * dt_; }

private:
    GridSpec grid_;
    double dt_ = 0.0;
    std::vector<GradientField> snaps_;
};

/// The memory coefficient A1 resolved on a grid, evaluated per time lag.
class MemoryKernel {
public:
    MemoryKernel() = default;

    static MemoryKernel zero();
    /// Fine-scale kernel A1(t, x, x/eps) sampled at cell centers.
    static MemoryKernel from_coefficient(const OscillatoryCoefficient& A1, const GridSpec& g, double eps);
    /// Uniform tensors C1(t_n), t_n = n * dt_seq, linearly interpolated in time (held
    /// constant past the last node).
    static MemoryKernel from_sequence(const GridSpec& g, std::vector<Tensor4> seq, double dt_seq);
    /// Separable uniform kernel k(t) * C.
    static MemoryKernel separable_uniform(const GridSpec& g, std::function<double(double)> k, const Tensor4& C);

    bool is_zero() const { return zero_; }

    /// Trapezoidal memory stress sum_m c_m dt A1(t - t_m) grad u(t_m). Requires
    /// t = (hist.size() - 1) * dt; throws StateError otherwise.
    GradientField convolve(const MemoryHistory& hist, double t) const;

    /// Coefficient operator at a given lag.
    std::shared_ptr<const ViscousOperator> at_lag(int lag, double dt) const;

private:
    bool zero_ = true;
    GridSpec grid_;
    std::function<double(double)> factor_;
    std::shared_ptr<const ViscousOperator> base_;
    std::function<std::shared_ptr<const ViscousOperator>(double)> at_time_;
    struct Cache {
        std::mutex mu;
        std::map<long long, std::shared_ptr<const ViscousOperator>> ops;
    };
    std::shared_ptr<Cache> cache_;
};

/// Memory stress as a physical cell tensor field.
TensorField memory_convolution(const MemoryHistory& hist, const OscillatoryCoefficient& A1, double t, double eps);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter_factor = 10;  ///< max iterations = factor * nx * ny
};

struct StepReport {
    int iterations = 0;
    double relative_residual = 0.0;
    double max_divergence = 0.0;
    double pressure_mean = 0.0;
};

class StokesSolver {
public:
    /// Fine-scale solver: A0(t, x, x/eps) sampled per cell.
    StokesSolver(const GridSpec& g, const OscillatoryCoefficient& A0, MemoryKernel A1, double eps,
                 SolverOptions opts = {});
    /// Solver with an explicit (time-independent) viscous operator.
    StokesSolver(const GridSpec& g, ViscousOperator K, MemoryKernel A1, SolverOptions opts = {});

    const GridSpec& grid() const { return grid_; }
    const MemoryKernel& memory() const { return A1_; }
    const ViscousOperator& viscous(double t);
    Projector& projector() { return projector_; }

    /// Advances state by dt using memory from hist (which must end at state.t); does not
    /// modify hist.
    StepReport step(StokesState& state, const MemoryHistory& hist, const VectorField& F);
    /// step() followed by appending grad u^{n+1} to hist.
    StepReport advance(StokesState& state, MemoryHistory& hist, const VectorField& F);
    /// Step with a precomputed memory stress M (physical, native locations).
    StepReport step_with_stress(StokesState& state, const GradientField* M, const VectorField& F);

    /// Steady problem K u = P f in V_h.
    VectorField solve_steady(const VectorField& f, StepReport* report = nullptr);

    /// Solves (sigma I + tau K) x = b for b in V_h (x in V_h, initial guess used).
    PcgResult solve_shifted(const VectorField& b, VectorField& x, double sigma, double tau, double t);

    /// Memory history seeded with grad u0.
    MemoryHistory start_history(const VectorField& u0) const;

private:
    VectorField precondition(const VectorField& r, double sigma, double tau_abar);

    GridSpec grid_;
    OscillatoryCoefficient A0_;
    bool fine_ = false;
    double eps_ = 1.0;
    MemoryKernel A1_;
    SolverOptions opts_;
    ViscousOperator K_;
    double K_time_ = -1.0;
    Projector projector_;
    DirichletHelmholtz pre_u_;
    DirichletHelmholtz pre_v_;
    std::vector<double> scratch_u_, scratch_v_;
};

}  // namespace nlsv
