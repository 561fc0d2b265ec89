/// @file test_stokes_fixed_point.cpp
/// @brief Stokes stepping invariants, memory convolution, the Volterra reference
/// integrator and Picard iteration of the solution map S.

#include "nlsv/acceptance.hpp"
#include "nlsv/operator_s.hpp"
#include "nlsv/scenarios.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace nlsv;

// ============================================================================
// Stokes
// ============================================================================

TEST(Stokes, StepIsDivergenceFreeWithZeroWallsAndMeanFreePressure) {
    const GridSpec g = test::grid(20);
    StokesSolver s(g, make_sinusoidal_coefficient(), MemoryKernel::zero(), 0.25);
    StokesState st(g);
    st.u = stream_function_velocity(g, 0.3);
    const MemoryHistory h = s.start_history(st.u);
    const VectorField F = test::random_field(g, 8);
    const StepReport r = s.step(st, h, F);
    EXPECT_LT(r.max_divergence, 1e-10);
    EXPECT_EQ(st.u.boundary_max_abs(), 0.0);
    EXPECT_NEAR(st.p.mean(), 0.0, 1e-12 * std::max(1.0, st.p.max_abs()));
    EXPECT_DOUBLE_EQ(st.t, g.dt);
}

TEST(Stokes, SteadySolveSatisfiesTheProjectedEquation) {
    const GridSpec g = test::grid(16);
    const ViscousOperator K(g, sample_cells(make_checkerboard_coefficient(), g, 0.0, 0.5));
    SolverOptions so;
    so.tol = 1e-12;
    StokesSolver s(g, K, MemoryKernel::zero(), so);
    const VectorField f = test::random_field(g, 2);
    const VectorField u = s.solve_steady(f);
    EXPECT_LT(max_abs_divergence(u), 1e-10);
    VectorField r = K.apply(u);
    r -= f;
    s.projector().project(r);
    EXPECT_LT(r.max_abs(), 1e-8 * f.max_abs());
}

TEST(Stokes, UnforcedEnergyDecays) {
    const GridSpec g = test::grid(16, 0.01, 0.1);
    StokesSolver s(g, make_checkerboard_coefficient(), MemoryKernel::zero(), 0.5);
    StokesState st(g);
    st.u = stream_function_velocity(g, 1.0);
    MemoryHistory h = s.start_history(st.u);
    const VectorField F(g);
    double prev = l2_norm_sq(st.u);
    for (int n = 0; n < g.steps(); ++n) {
        s.advance(st, h, F);
        const double e = l2_norm_sq(st.u);
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(Stokes, HistoryOutOfSyncIsRejected) {
    const GridSpec g = test::grid(8);
    StokesSolver s(g, make_constant_coefficient(1.0), MemoryKernel::zero(), 1.0);
    StokesState st(g);
    MemoryHistory h = s.start_history(st.u);
    st.t = 0.5;
    EXPECT_THROW(s.advance(st, h, VectorField(g)), StateError);
}

TEST(Memory, TrapezoidConvolutionOfConstantHistory) {
    const GridSpec g = test::grid(6, 0.1, 1.0);
    const MemoryKernel k = MemoryKernel::separable_uniform(g, [](double) { return 1.0; }, Tensor4::identity());
    MemoryHistory h(g, g.dt);
    GradientField G(g);
    G.fill(Mat2{0.5, -1.0, 2.0, -0.5});
    for (int n = 0; n < 3; ++n) h.append(G);
    const GradientField M = k.convolve(h, 2 * g.dt);
    for (std::size_t c = 0; c < M.dudx.size(); ++c) {
        EXPECT_NEAR(M.dudx[c], 2 * g.dt * 0.5, 1e-14);
        EXPECT_NEAR(M.dvdy[c], 2 * g.dt * -0.5, 1e-14);
    }
    for (std::size_t c = 0; c < M.dudy.size(); ++c) EXPECT_NEAR(M.dudy[c], 2 * g.dt * -1.0, 1e-14);
    EXPECT_THROW(k.convolve(h, g.dt), StateError);
}

TEST(Memory, SequenceKernelInterpolatesLinearly) {
    const GridSpec g = test::grid(4, 0.1, 1.0);
    const MemoryKernel k = MemoryKernel::from_sequence(g, {Tensor4::identity(2.0), Tensor4::identity(1.0)}, 0.2);
    MemoryHistory h(g, g.dt);
    GradientField G(g);
    G.fill(Mat2{1.0, 0.0, 0.0, 0.0});
    h.append(G);
    h.append(G);
    // Lags 0.1 and 0: c = 1/2 each, kernels 1.5 and 2.
    const GradientField M = k.convolve(h, g.dt);
    EXPECT_NEAR(M.dudx[0], 0.5 * g.dt * (1.5 + 2.0), 1e-14);
}

// ============================================================================
// Volterra reference
// ============================================================================

TEST(VolterraReference, MatchesClosedForm) {
    // a = k = 1: c(t) = e^{-t} cos t.
    const std::vector<double> c = volterra_reference(1.0, 1.0, 0.1, 30);
    for (int n = 0; n <= 30; ++n) EXPECT_NEAR(c[n], std::exp(-0.1 * n) * std::cos(0.1 * n), 1e-12);
}

// ============================================================================
// Solution map S
// ============================================================================

namespace {

SProblem problem(bool particles, bool memory) {
    const GridSpec g = test::grid(12, 1.0 / 32.0, 0.25);
    const Scenario sc = scenario_by_name("coupled-cloud");
    SProblem p;
    p.solver = std::make_shared<StokesSolver>(
        g, sc.A0, memory ? MemoryKernel::from_coefficient(sc.A1, g, 1.0) : MemoryKernel::zero(), 1.0);
    p.u0 = sc.u0(g);
    if (particles) p.particles = init_from_density(sc.f0, {12, 12, 6, 6}, sc.vmax);
    p.eps = 1.0;
    p.reg.lambda = 0.1;
    p.steps = g.steps();
    return p;
}

}  // namespace

TEST(OperatorS, IndependentOfInputWithoutCouplingTerms) {
    const OperatorS S(problem(false, false));
    const FixedPointResult r = fixed_point_solve(S, 1e-12, 5);
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(r.log.size(), 2u);
    EXPECT_EQ(r.log.back().residual, 0.0);
}

TEST(OperatorS, DeterministicAndShapePreserving) {
    const OperatorS S(problem(true, true));
    const Trajectory w = S.zero_trajectory();
    EXPECT_EQ(static_cast<int>(w.size()), S.problem().steps + 1);
    const Trajectory a = S.apply(w), b = S.apply(w);
    ASSERT_EQ(a.size(), w.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        EXPECT_EQ(a[n].u_data(), b[n].u_data());
        EXPECT_EQ(a[n].v_data(), b[n].v_data());
    }
}

TEST(OperatorS, PicardConvergesMonotonically) {
    const OperatorS S(problem(true, true));
    const FixedPointResult r = fixed_point_solve(S, 1e-8, 30);
    ASSERT_TRUE(r.converged);
    for (std::size_t k = 1; k < r.log.size(); ++k) EXPECT_LT(r.log[k].residual, r.log[k - 1].residual);
    std::ostringstream os;
    write_picard_log(os, r.log);
    EXPECT_EQ(os.str().rfind("iter,residual,energy\n", 0), 0u);
}

TEST(OperatorS, NormsAreTrapezoidal) {
    const GridSpec g = test::grid(8);
    VectorField one(g);
    one.fill(1.0);
    one.zero_boundary();
    const Trajectory a = {one, one, one};
    EXPECT_NEAR(l2q_norm_sq(a, 0.5), 1.0 * l2_norm_sq(one), 1e-14);
    EXPECT_NEAR(l2q_distance(a, a, 0.5), 0.0, 0.0);
}
