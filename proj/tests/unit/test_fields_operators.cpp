/// @file test_fields_operators.cpp
/// @brief Grid invariants, discrete operators, projection and viscous operator properties.

#include "nlsv/projection.hpp"
#include "nlsv/scenarios.hpp"
#include "nlsv/transforms.hpp"
#include "nlsv/viscous.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlsv;

// ============================================================================
// GridSpec
// ============================================================================

TEST(GridSpec, RejectsUnderresolvedEps) {
    GridSpec g = test::grid(32);
    g.eps = 1.0 / 4.0;
    EXPECT_NO_THROW(g.validate(true));
    g.eps = 1.0 / 8.0;
    EXPECT_THROW(g.validate(true), ConfigError);
}

TEST(GridSpec, ReciprocalIntegerCheck) {
    EXPECT_TRUE(is_reciprocal_integer(0.25));
    EXPECT_TRUE(is_reciprocal_integer(1.0 / 3.0));
    EXPECT_FALSE(is_reciprocal_integer(0.3));
}

TEST(GridSpec, StepsRoundToNearest) {
    GridSpec g = test::grid(8, 0.1, 1.0);
    EXPECT_EQ(g.steps(), 10);
}

// ============================================================================
// Divergence, gradient, adjoints
// ============================================================================

TEST(Operators, StreamFunctionVelocityIsDiscretelyDivergenceFree) {
    const GridSpec g = test::grid(24);
    const VectorField u = stream_function_velocity(g, 0.7);
    EXPECT_LT(max_abs_divergence(u), 1e-12);
    EXPECT_EQ(u.boundary_max_abs(), 0.0);
}

TEST(Operators, GradientIsMinusAdjointOfDivergence) {
    const GridSpec g = test::grid(12);
    const VectorField u = test::random_field(g, 3);
    ScalarField phi(g);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto& x : phi.data()) x = d(rng);
    const ScalarField div = divergence(u);
    double lhs = 0.0;
    for (std::size_t k = 0; k < phi.data().size(); ++k) lhs += phi.data()[k] * div.data()[k];
    lhs *= g.cell_area();
    EXPECT_NEAR(lhs, -inner_product(gradient(phi), u), 1e-11);
}

TEST(Operators, GradientTransposeIsAdjointOfVelocityGradient) {
    const GridSpec g = test::grid(10);
    const VectorField u = test::random_field(g, 11);
    const VectorField w = test::random_field(g, 12);
    const GradientField Gw = velocity_gradient(w);
    // (grad u, grad w) computed two ways: the weighted form and u . G^T grad w.
    const ViscousOperator K(g, Tensor4::identity());
    EXPECT_NEAR(inner_product(u, gradient_transpose(Gw)), inner_product(u, K.apply(w)), 1e-9);
    const GradientField Gu = velocity_gradient(u);
    double form = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            form += Gu.dudx[Gu.cell(i, j)] * Gw.dudx[Gw.cell(i, j)] + Gu.dvdy[Gu.cell(i, j)] * Gw.dvdy[Gw.cell(i, j)];
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            form += corner_weight(g, i, j) *
                    (Gu.dudy[Gu.corner(i, j)] * Gw.dudy[Gw.corner(i, j)] + Gu.dvdx[Gu.corner(i, j)] * Gw.dvdx[Gw.corner(i, j)]);
    form *= g.cell_area();
    EXPECT_NEAR(inner_product(u, gradient_transpose(Gw)), form, 1e-9);
}

TEST(Operators, GradientNormMatchesIdentityEnergy) {
    const GridSpec g = test::grid(16);
    const VectorField u = test::random_field(g, 21);
    const ViscousOperator K(g, Tensor4::identity());
    EXPECT_NEAR(K.energy(u), gradient_norm_sq(u), 1e-9 * gradient_norm_sq(u));
}

// ============================================================================
// Viscous operator
// ============================================================================

TEST(Viscous, SymmetricAndCoercive) {
    const GridSpec g = test::grid(16);
    const ViscousOperator K(g, sample_cells(make_checkerboard_coefficient(), g, 0.0, 0.25));
    const VectorField u = test::random_field(g, 1), w = test::random_field(g, 2);
    EXPECT_NEAR(inner_product(K.apply(u), w), inner_product(u, K.apply(w)), 1e-9);
    // alpha = 1 for the checkerboard coefficient.
    EXPECT_GE(K.energy(u), gradient_norm_sq(u) * (1.0 - 1e-12));
}

TEST(Viscous, UniformTensorOnUniformGradientIsExact) {
    const GridSpec g = test::grid(6);
    Tensor4 C;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) C(a, b) = (a == b ? 2.0 : 0.0) + 0.1 * (a + b);
    const ViscousOperator K(g, C);
    GradientField G(g);
    const Mat2 xi{0.3, -1.2, 0.5, 0.7};
    G.fill(xi);
    const GradientField S = K.stress(G);
    const Mat2 expect = C.apply(xi);
    for (std::size_t k = 0; k < S.dudx.size(); ++k) {
        EXPECT_NEAR(S.dudx[k], expect.xx, 1e-13);
        EXPECT_NEAR(S.dvdy[k], expect.yy, 1e-13);
    }
    for (std::size_t k = 0; k < S.dudy.size(); ++k) {
        EXPECT_NEAR(S.dudy[k], expect.xy, 1e-13);
        EXPECT_NEAR(S.dvdx[k], expect.yx, 1e-13);
    }
}

// ============================================================================
// Projection and fast solvers
// ============================================================================

TEST(Projection, DivergenceFreeIdempotentAndKillsGradients) {
    const GridSpec g = test::grid(20);
    Projector P(g);
    VectorField u = test::random_field(g, 7);
    P.project(u);
    EXPECT_LT(max_abs_divergence(u), 1e-10);
    VectorField again = u;
    P.project(again);
    again -= u;
    EXPECT_LT(again.max_abs(), 1e-10);

    ScalarField phi(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) phi(i, j) = std::cos(0.3 * i) * std::sin(0.2 * j + 0.1);
    VectorField gp = gradient(phi);
    P.project(gp);
    EXPECT_LT(gp.max_abs(), 1e-10);
}

TEST(Transforms, NeumannPoissonInvertsTheCellLaplacian) {
    const GridSpec g = test::grid(16);
    ScalarField phi(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) phi(i, j) = std::sin(0.37 * i * j + 0.2 * i);
    const double m = phi.mean();
    for (auto& x : phi.data()) x -= m;
    ScalarField rhs = divergence(gradient(phi));
    NeumannPoisson solver(g.nx, g.ny, g.dx(), g.dy());
    solver.solve(rhs.data());
    double err = 0.0;
    for (std::size_t k = 0; k < rhs.data().size(); ++k) err = std::max(err, std::abs(rhs.data()[k] - phi.data()[k]));
    EXPECT_LT(err, 1e-10);
}

TEST(Transforms, LaplacianSymbolMatchesSecondDifference) {
    const double h = 0.1, th = 0.7;
    EXPECT_NEAR(laplacian_symbol(th, h), (2.0 - 2.0 * std::cos(th)) / (h * h), 1e-12);
}
