/// @file test_cell_homogenized.cpp
/// @brief Cell problem against the laminate oracle, effective-tensor properties, memory
/// kernel identities and the homogenized system.

#include "nlsv/homogenized.hpp"
#include "nlsv/scenarios.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlsv;

namespace {

CellProblemSpec spec_for(const OscillatoryCoefficient& A0, int m, OscillatoryCoefficient A1 = make_zero_coefficient()) {
    CellProblemSpec s;
    s.A0 = A0;
    s.A1 = std::move(A1);
    s.alpha = A0.alpha;
    s.n_cell = m;
    return s;
}

}  // namespace

// ============================================================================
// Periodic operators
// ============================================================================

TEST(PeriodicOps, GradientTransposeIsAdjoint) {
    const int m = 8;
    PeriodicVector w(m), z(m);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto* a : {&w.u, &w.v, &z.u, &z.v})
        for (auto& x : *a) x = d(rng);
    const PeriodicGradient Gw = periodic_gradient(w);
    PeriodicGradient S(m);
    for (auto& c : S.g)
        for (auto& x : c) x = d(rng);
    double lhs = 0.0;
    for (int a = 0; a < 4; ++a)
        for (std::size_t k = 0; k < S.g[a].size(); ++k) lhs += Gw.g[a][k] * S.g[a][k];
    EXPECT_NEAR(lhs, dot(w, periodic_gradient_transpose(S)), 1e-12);
}

TEST(PeriodicOps, ProjectorRemovesDivergence) {
    const int m = 16;
    PeriodicVector w(m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            w.u[w.idx(i, j)] = std::sin(2 * M_PI * i / m) + 0.3 * std::cos(2 * M_PI * j / m);
            w.v[w.idx(i, j)] = std::cos(2 * M_PI * (i + j) / m);
        }
    PeriodicProjector P(m);
    P.project(w);
    double div = 0.0;
    for (double x : periodic_divergence(w)) div = std::max(div, std::abs(x));
    EXPECT_LT(div, 1e-10);
}

// ============================================================================
// Effective viscosity
// ============================================================================

TEST(CellProblem, ConstantCoefficientHasNoCorrector) {
    const CellProblemSpec s = spec_for(make_constant_coefficient(2.5), 16);
    const Corrector c = compute_correctors(s);
    EXPECT_LE(c.max_abs(), 1e-12);
    const Tensor4 C0 = effective_C0(s, c);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_NEAR(C0(a, b), a == b ? 2.5 : 0.0, 1e-12);
}

TEST(CellProblem, LaminateMatchesArithmeticAndHarmonicMeans) {
    // A0 = (2 + sin 2 pi y1) I: dv/dx sees the harmonic mean sqrt(3), the other
    // components the arithmetic mean 2 (du/dx is pinned by incompressibility).
    double prev_err = 0.0;
    for (int m : {32, 64}) {
        const CellProblemSpec s = spec_for(make_sinusoidal_coefficient(), m);
        const Tensor4 C0 = effective_C0(s, compute_correctors(s, 2));
        EXPECT_NEAR(C0(0, 0), 2.0, 1e-10);
        EXPECT_NEAR(C0(1, 1), 2.0, 1e-10);
        EXPECT_NEAR(C0(3, 3), 2.0, 1e-10);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a != b) {
                    EXPECT_NEAR(C0(a, b), 0.0, 1e-10);
                }
        const double err = C0(2, 2) - std::sqrt(3.0);
        EXPECT_GT(err, 0.0);
        EXPECT_LT(err, 5e-3);
        if (prev_err > 0.0) {
            EXPECT_NEAR(prev_err / err, 4.0, 0.5);
        }
        prev_err = err;
    }
}

TEST(CellProblem, CheckerboardTensorSymmetricBetweenReussAndVoigt) {
    const CellProblemSpec s = spec_for(make_checkerboard_coefficient(1.0, 3.0), 32);
    const Corrector c = compute_correctors(s, 2);
    const Tensor4 C0 = effective_C0(s, c);
    const TensorAudit a = audit_effective_tensor(C0, mean_coefficient(s), 1.0, 100);
    EXPECT_TRUE(a.passed());
    // Harmonic mean of {1, 3} is 1.5, arithmetic mean 2.
    for (int k = 0; k < 4; ++k) {
        EXPECT_GT(C0(k, k), 1.5);
        EXPECT_LT(C0(k, k), 2.0);
    }
    for (int b = 0; b < 4; ++b) {
        EXPECT_LT(c.residual[b], 1e-8);
        const Vec2 mu = c.chi[b].mean();
        EXPECT_NEAR(mu.x, 0.0, 1e-12);
        EXPECT_NEAR(mu.y, 0.0, 1e-12);
    }
}

// ============================================================================
// Memory kernel
// ============================================================================

TEST(CellProblem, SeparableMemoryKernelIsProportionalToC0) {
    const CellProblemSpec s = spec_for(make_sinusoidal_coefficient(), 32, make_exp_memory_coefficient(0.1));
    const Corrector c = compute_correctors(s);
    const Tensor4 C0 = effective_C0(s, c);
    const double dt = 0.1;
    const std::vector<Tensor4> C1 = effective_C1(s, c, dt, 10);
    ASSERT_EQ(C1.size(), 11u);
    for (int n = 0; n <= 10; ++n)
        for (int k = 0; k < 16; ++k) EXPECT_NEAR(C1[n].c[k], 0.1 * std::exp(-n * dt) * C0.c[k], 1e-12);
}

TEST(CellProblem, ImpulseResponseReproducesC1) {
    const CellProblemSpec s = spec_for(make_sinusoidal_coefficient(), 32, make_exp_memory_coefficient(0.1));
    const Corrector c = compute_correctors(s);
    const double dt = 0.05;
    const int steps = 8;
    const std::vector<Tensor4> C1 = effective_C1(s, c, dt, steps);
    const Mat2 xi{0.4, -0.3, 0.9, -0.4};
    const std::vector<Mat2> K = impulse_kernel(volterra_impulse_response(s, xi, dt, steps), dt);
    for (int n = 1; n <= steps; ++n) {
        const Mat2 expect = C1[n].apply(xi);
        EXPECT_NEAR(K[n].xx, expect.xx, 1e-8);
        EXPECT_NEAR(K[n].xy, expect.xy, 1e-8);
        EXPECT_NEAR(K[n].yx, expect.yx, 1e-8);
        EXPECT_NEAR(K[n].yy, expect.yy, 1e-8);
    }
}

TEST(CellProblem, QuadraticFormIsBilinear) {
    const Tensor4 C = Tensor4::from_matrix(Mat2{2.0, 0.5, 0.5, 1.0});
    const Mat2 a{1, 2, 3, 4}, b{-1, 0.5, 2, 1};
    EXPECT_NEAR(quadratic_form(C, a, b), quadratic_form(C, b, a), 1e-14);
    EXPECT_NEAR(quadratic_form(C, 2.0 * a, b), 2.0 * quadratic_form(C, a, b), 1e-13);
}

// ============================================================================
// Homogenized system
// ============================================================================

TEST(Homogenized, ConstantCoefficientReconstructionIsIdentity) {
    const GridSpec g = test::grid(16);
    const CellProblemSpec s = spec_for(make_constant_coefficient(1.0), 16);
    const HomogenizationResult h = homogenize(s, g.dt, 3);
    EXPECT_EQ(h.tensors.C1_seq.size(), 4u);
    const VectorField u0 = stream_function_velocity(g, 0.2);
    VectorField r = corrector_reconstruction(u0, h.corrector, 0.25);
    r -= u0;
    EXPECT_LT(r.max_abs(), 1e-13);
}

TEST(Homogenized, ReconstructionAddsAnOrderEpsCorrector) {
    const GridSpec g = test::grid(32);
    const CellProblemSpec s = spec_for(make_sinusoidal_coefficient(), 32);
    const Corrector c = compute_correctors(s);
    const VectorField u0 = stream_function_velocity(g, 0.2);
    double prev = 0.0;
    for (double eps : {0.25, 0.125}) {
        VectorField r = corrector_reconstruction(u0, c, eps);
        r -= u0;
        const double n = std::sqrt(l2_norm_sq(r));
        EXPECT_GT(n, 0.0);
        if (prev > 0.0) {
            EXPECT_NEAR(n / prev, 0.5, 0.1);
        }
        prev = n;
    }
}

TEST(Homogenized, LimitSystemKeepsPositionsAndDecaysEnergy) {
    const GridSpec g = test::grid(16, 0.02, 0.2);
    EffectiveTensors t;
    t.C0 = Tensor4::identity(1.5);
    t.C1_seq = {Tensor4{}, Tensor4{}};
    t.dt = g.dt;
    t.alpha = 1.0;
    ParticleEnsemble p;
    p.add({0.5, 0.5}, {0.2, 0.0}, 0.5);
    CoupledSystem sys = make_homogenized_system(g, t, stream_function_velocity(g, 0.2), p);
    const double E0 = sys.energy_ledger().energy();
    sys.run(g.steps());
    EXPECT_EQ(sys.particles().x[0], 0.5);
    EXPECT_LE(sys.energy_ledger().ledger_total(1.0), E0 * (1.0 + 1e-10));
}
