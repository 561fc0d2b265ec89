#include "nlsv/homogenized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlsv {

TensorAudit audit_effective_tensor(const Tensor4& C, const Tensor4& M, double alpha, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto draw = [&] { return Mat2::from_flat({U(rng), U(rng), U(rng), U(rng)}); };
    TensorAudit a;
    a.min_coercivity_margin = a.min_voigt_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const Mat2 xi = draw(), eta = draw();
        a.max_asymmetry = std::max(a.max_asymmetry, std::abs(quadratic_form(C, xi, eta) - quadratic_form(C, eta, xi)));
        const double q = quadratic_form(C, xi, xi);
        a.min_coercivity_margin = std::min(a.min_coercivity_margin, q - alpha * inner(xi, xi));
        a.min_voigt_margin = std::min(a.min_voigt_margin, quadratic_form(M, xi, xi) - q);
    }
    return a;
}

HomogenizationResult homogenize(const CellProblemSpec& spec, double dt, int steps, int workers) {
    HomogenizationResult r;
    r.corrector = compute_correctors(spec, workers);
    r.tensors.C0 = effective_C0(spec, r.corrector);
    r.tensors.C1_seq = effective_C1(spec, r.corrector, dt, steps);
    r.tensors.dt = dt;
    r.tensors.alpha = spec.alpha;
    r.mean_A0 = mean_coefficient(spec);
    return r;
}

std::shared_ptr<StokesSolver> make_homogenized_solver(const GridSpec& g, const EffectiveTensors& tensors,
                                                      SolverOptions opts) {
    MemoryKernel k = tensors.C1_seq.empty() ? MemoryKernel::zero()
                                            : MemoryKernel::from_sequence(g, tensors.C1_seq, tensors.dt);
    return std::make_shared<StokesSolver>(g, ViscousOperator(g, tensors.C0), std::move(k), opts);
}

CoupledSystem make_homogenized_system(const GridSpec& g, const EffectiveTensors& tensors, VectorField u0,
                                      ParticleEnsemble particles, RegularizationParams reg) {
    CoupledOptions opts;
    opts.eps = 0.0;
    opts.reg = reg;
    opts.alpha = tensors.alpha > 0.0 ? tensors.alpha : 1.0;
    opts.frozen_positions = true;
    return CoupledSystem(make_homogenized_solver(g, tensors), std::move(u0), std::move(particles), opts);
}

VectorField corrector_reconstruction(const VectorField& u0, const Corrector& corr, double eps) {
    const GridSpec& g = u0.grid();
    const TensorField grad = velocity_gradient(u0).to_cell_tensor();
    const double dx = g.dx(), dy = g.dy();
    auto grad_at = [&](Vec2 x) {
        const double gx = std::clamp(x.x / dx - 0.5, 0.0, g.nx - 1.0);
        const double gy = std::clamp(x.y / dy - 0.5, 0.0, g.ny - 1.0);
        const int i0 = std::min(static_cast<int>(gx), g.nx - 2 < 0 ? 0 : g.nx - 2);
        const int j0 = std::min(static_cast<int>(gy), g.ny - 2 < 0 ? 0 : g.ny - 2);
        const int i1 = std::min(i0 + 1, g.nx - 1), j1 = std::min(j0 + 1, g.ny - 1);
        const double sx = gx - i0, sy = gy - j0;
        return (1 - sx) * (1 - sy) * grad(i0, j0) + sx * (1 - sy) * grad(i1, j0) + (1 - sx) * sy * grad(i0, j1) +
               sx * sy * grad(i1, j1);
    };
    VectorField out = u0;
    for (int jj = 1; jj <= g.ny; ++jj)
        for (int i = 1; i < g.nx; ++i) {
            const Vec2 x = u0.u_position(i, jj);
            out.u(i, jj) += eps * corr.evaluate(grad_at(x), (1.0 / eps) * x).x;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int ii = 1; ii <= g.nx; ++ii) {
            const Vec2 x = u0.v_position(ii, j);
            out.v(ii, j) += eps * corr.evaluate(grad_at(x), (1.0 / eps) * x).y;
        }
    return out;
}

}  // namespace nlsv
