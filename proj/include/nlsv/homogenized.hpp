/// @file homogenized.hpp
/// @brief Limit problem: macroscopic nonlocal Stokes with uniform effective tensors C0,
/// C1 coupled to the limit kinetic equation on its y-independent invariant subspace
/// (positions frozen, velocities relax towards u0), plus first-order corrector
/// reconstruction.

#pragma once

#include "nlsv/cell_problem.hpp"
#include "nlsv/coupled.hpp"

#include <memory>
#include <random>
#include <vector>

namespace nlsv {

struct EffectiveTensors {
    Tensor4 C0;
    std::vector<Tensor4> C1_seq;  ///< C1(t_n), t_n = n * dt
    double dt = 0.0;
    double alpha = 0.0;           ///< coercivity constant inherited from A0
};

struct TensorAudit {
    double max_asymmetry = 0.0;        ///< max |<C xi, eta> - <C eta, xi>|
    double min_coercivity_margin = 0.0;  ///< min <C xi, xi> - alpha |xi|^2
    double min_voigt_margin = 0.0;     ///< min <M xi, xi> - <C xi, xi>
    bool passed(double sym_tol = 1e-8) const {
        return max_asymmetry <= sym_tol && min_coercivity_margin >= -1e-12 && min_voigt_margin >= -1e-12;
    }
};

/// Samples `samples` random unit-scale matrices (fixed seed) and checks symmetry,
/// coercivity and the upper bound by the cell-mean tensor M.
TensorAudit audit_effective_tensor(const Tensor4& C, const Tensor4& M, double alpha, int samples = 100,
                                   std::uint64_t seed = 7);

struct HomogenizationResult {
    EffectiveTensors tensors;
    Corrector corrector;
    Tensor4 mean_A0;
};

/// Correctors, C0 and the C1 sequence on t_n = n dt, n = 0..steps.
HomogenizationResult homogenize(const CellProblemSpec& spec, double dt, int steps, int workers = 1);

/// Stokes solver with the uniform C0 and the C1 sequence as memory kernel.
std::shared_ptr<StokesSolver> make_homogenized_solver(const GridSpec& g, const EffectiveTensors& tensors,
                                                      SolverOptions opts = {});

/// Homogenized coupled run: positions frozen (limit kinetic equation on y-independent data).
CoupledSystem make_homogenized_system(const GridSpec& g, const EffectiveTensors& tensors, VectorField u0,
                                      ParticleEnsemble particles, RegularizationParams reg = {});

/// u0(x) + eps chi_{grad u0(x)}(x / eps) at every interior node of u0's grid; grad u0 is
/// the cell-centered gradient, bilinearly interpolated (clamped at the walls).
VectorField corrector_reconstruction(const VectorField& u0, const Corrector& corr, double eps);

}  // namespace nlsv
