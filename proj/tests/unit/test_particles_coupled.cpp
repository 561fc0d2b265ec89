/// @file test_particles_coupled.cpp
/// @brief Particle transport, interpolation/deposition adjointness and coupled-step ledgers.

#include "nlsv/coupled.hpp"
#include "nlsv/interpolation.hpp"
#include "nlsv/scenarios.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlsv;

// ============================================================================
// Interpolation and deposition
// ============================================================================

TEST(Interpolation, ReproducesAffineFieldsExactly) {
    const GridSpec g = test::grid(8);
    VectorField u(g);
    for (int jj = 0; jj <= g.ny + 1; ++jj)
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 p = u.u_position(i, jj);
            u.u(i, jj) = 0.3 + 1.5 * p.x - 0.7 * p.y;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int ii = 0; ii <= g.nx + 1; ++ii) {
            const Vec2 p = u.v_position(ii, j);
            u.v(ii, j) = -0.2 + 0.4 * p.x + 2.0 * p.y;
        }
    for (const Vec2 x : {Vec2{0.0, 0.0}, Vec2{0.31, 0.97}, Vec2{1.0, 0.5}, Vec2{0.02, 0.999}}) {
        const Vec2 U = interpolate_velocity(u, x);
        EXPECT_NEAR(U.x, 0.3 + 1.5 * x.x - 0.7 * x.y, 1e-13);
        EXPECT_NEAR(U.y, -0.2 + 0.4 * x.x + 2.0 * x.y, 1e-13);
    }
    EXPECT_THROW(interpolate_velocity(u, {1.01, 0.5}), DomainError);
}

TEST(Interpolation, DepositionIsAdjointOfInterpolation) {
    const GridSpec g = test::grid(9);
    const VectorField u = test::random_field(g, 4);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    ParticleEnsemble ens;
    std::vector<Vec2> q;
    for (int k = 0; k < 50; ++k) {
        ens.add({d(rng), d(rng)}, {0.0, 0.0}, 1.0);
        q.push_back({d(rng) - 0.5, d(rng) - 0.5});
    }
    for (double lambda : {0.0, 0.05}) {
        const VectorField F = deposit_vectors(g, ens, q, lambda);
        const std::vector<Vec2> U = particle_velocity(ens, u, lambda);
        double rhs = 0.0;
        for (int k = 0; k < 50; ++k) rhs += dot(q[k], U[k]);
        EXPECT_NEAR(node_inner_product(F, u), rhs, 1e-11) << "lambda " << lambda;
    }
}

// ============================================================================
// Transport
// ============================================================================

TEST(Particles, ExactRelaxationAgainstFrozenVelocity) {
    ParticleEnsemble ens;
    ens.add({0.5, 0.5}, {1.0, -0.5}, 2.0);
    const Vec2 U{0.2, 0.1};
    const double eps = 0.3, dt = 0.05, e = std::exp(-dt);
    push_with_velocity(ens, {U}, eps, dt);
    EXPECT_NEAR(ens.vx[0], U.x + (1.0 - U.x) * e, 1e-15);
    EXPECT_NEAR(ens.vy[0], U.y + (-0.5 - U.y) * e, 1e-15);
    EXPECT_NEAR(ens.x[0], 0.5 + eps * (U.x * dt + (1.0 - U.x) * (1.0 - e)), 1e-15);
    EXPECT_EQ(ens.w[0], 2.0);
}

TEST(Particles, FoldingKeepsParticlesInsideAndPreservesSpeed) {
    ParticleEnsemble ens;
    ens.add({0.99, 0.01}, {5.0, -5.0}, 1.0);
    const PushReport r = push_with_velocity(ens, {Vec2{5.0, -5.0}}, 1.0, 0.01);
    EXPECT_EQ(r.reflections, 2);
    EXPECT_LE(ens.x[0], 1.0);
    EXPECT_GE(ens.y[0], 0.0);
    EXPECT_DOUBLE_EQ(ens.vx[0], -5.0);
    EXPECT_DOUBLE_EQ(ens.vy[0], 5.0);
}

TEST(Particles, PhaseVolumeOfUnitSimplex) {
    std::array<PhasePoint, 5> s{};
    for (int k = 0; k < 4; ++k) s[k + 1][k] = 1.0;
    EXPECT_NEAR(phase_volume(s), 1.0 / 24.0, 1e-15);
    s[4] = s[3];
    EXPECT_EQ(phase_volume(s), 0.0);
}

TEST(Particles, ThinningKeepsHeaviestInOrder) {
    ParticleEnsemble ens;
    const double w[] = {0.1, 0.5, 0.3, 0.5, 0.2};
    for (int k = 0; k < 5; ++k) ens.add({0.1 * k, 0.1}, {0.0, 0.0}, w[k]);
    thin_ensemble(ens, 3);
    ASSERT_EQ(ens.size(), 3u);
    EXPECT_EQ(ens.w[0], 0.5);
    EXPECT_EQ(ens.w[1], 0.3);
    EXPECT_EQ(ens.w[2], 0.5);
    EXPECT_DOUBLE_EQ(ens.x[0], 0.1);
}

TEST(Particles, LatticeSamplingIntegratesTheDensity) {
    // Constant density 1 on [0,1]^2 x [-1,1]^2 has mass 4.
    const ParticleEnsemble ens = init_from_density([](Vec2, Vec2) { return 1.0; }, {4, 4, 4, 4}, 1.0);
    EXPECT_EQ(ens.size(), 256u);
    EXPECT_NEAR(moments(ens).mass, 4.0, 1e-13);
}

TEST(Regularization, TruncationAndMollifier) {
    EXPECT_EQ(truncation({3.0, 4.0}, 0.0), 1.0);
    EXPECT_EQ(truncation({0.5, 0.0}, 1.0), 1.0);
    EXPECT_EQ(truncation({2.5, 0.0}, 1.0), 0.0);
    EXPECT_NEAR(truncation_profile(1.5), 0.5, 1e-14);
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 0.05) {
        EXPECT_LE(truncation_profile(r), prev + 1e-15);
        prev = truncation_profile(r);
    }
    const MollifierQuadrature q(6);
    double s = 0.0;
    for (double w : q.weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_EQ(mollifier({1.0, 0.0}), 0.0);
}

// ============================================================================
// Coupled step
// ============================================================================

namespace {

CoupledSystem small_system(bool memory) {
    const GridSpec g = test::grid(16, 0.01, 0.2);
    const Scenario sc = scenario_by_name("coupled-cloud");
    auto solver = std::make_shared<StokesSolver>(
        g, sc.A0, memory ? MemoryKernel::from_coefficient(sc.A1, g, 0.5) : MemoryKernel::zero(), 0.5);
    ParticleEnsemble p = init_from_density(sc.f0, {16, 16, 6, 6}, sc.vmax);
    CoupledOptions o;
    o.eps = 0.5;
    o.alpha = sc.alpha;
    return CoupledSystem(solver, sc.u0(g), std::move(p), o);
}

}  // namespace

TEST(Coupled, DragForceBalancesParticleMomentum) {
    CoupledSystem sys = small_system(false);
    for (int n = 0; n < 5; ++n) {
        const StepDiagnostics d = sys.step();
        // Cloud stays away from the walls, so every deposit lands on interior nodes.
        EXPECT_NEAR(d.force_on_fluid.x, d.particle_momentum_loss.x, 1e-12);
        EXPECT_NEAR(d.force_on_fluid.y, d.particle_momentum_loss.y, 1e-12);
        EXPECT_LT(d.fluid.max_divergence, 1e-8);
    }
}

TEST(Coupled, LedgerInequalityAndDragBound) {
    CoupledSystem sys = small_system(true);
    const double E0 = sys.energy_ledger().energy();
    for (int n = 0; n < 20; ++n) {
        sys.step();
        const EnergyReport r = sys.energy_ledger();
        EXPECT_TRUE(r.finite_nonnegative());
        EXPECT_LE(r.ledger_total(sys.options().alpha), E0 * (1.0 + 10.0 * sys.grid().dt));
        EXPECT_LE(r.drag_l1_cum, r.drag_l1_bound() * (1.0 + 1e-12));
    }
}

TEST(Coupled, FrozenPositionsOnlyRelaxVelocities) {
    const GridSpec g = test::grid(16, 0.01, 0.1);
    auto solver = std::make_shared<StokesSolver>(g, make_constant_coefficient(1.0), MemoryKernel::zero(), 1.0);
    ParticleEnsemble p;
    p.add({0.3, 0.4}, {1.0, 0.0}, 1.0);
    CoupledOptions o;
    o.frozen_positions = true;
    CoupledSystem sys(solver, stream_function_velocity(g, 0.1), p, o);
    sys.run(5);
    EXPECT_EQ(sys.particles().x[0], 0.3);
    EXPECT_EQ(sys.particles().y[0], 0.4);
    EXPECT_LT(sys.particles().vx[0], 1.0);
}

TEST(WeakForm, AdmissibilityIsEnforced) {
    TestFunction phi;
    phi.value = [](double, Vec2 x, Vec2) { return x.x; };
    phi.dt = [](double, Vec2, Vec2) { return 0.0; };
    phi.grad_x = [](double, Vec2, Vec2) { return Vec2{1.0, 0.0}; };
    phi.grad_v = [](double, Vec2, Vec2) { return Vec2{}; };
    EXPECT_THROW(check_admissible(phi, 1.0, 1.0, 1.0), StateError);
}

TEST(WeakForm, ResidualVanishesForTimeOnlyTestFunctionWithoutTransport) {
    // phi = (T - t): residual = sum w (-T) + sum w T = 0 up to the time quadrature, which
    // is exact for a linear integrand.
    TestFunction phi;
    const double T = 0.1;
    phi.value = [=](double t, Vec2, Vec2) { return T - t; };
    phi.dt = [](double, Vec2, Vec2) { return -1.0; };
    phi.grad_x = [](double, Vec2, Vec2) { return Vec2{}; };
    phi.grad_v = [](double, Vec2, Vec2) { return Vec2{}; };
    CoupledSystem sys = small_system(false);
    WeakFormAccumulator acc(phi, 0.5);
    sys.attach_weak_form(&acc);
    sys.run(10);
    EXPECT_LT(acc.residual(), 1e-12);
}
