/// @file cell_problem.hpp
/// @brief Periodic cell problem on the unit cell and the effective tensors C0, C1.
///
/// Periodic MAC layout on an m x m cell grid with spacing h = 1/m:
///   u(i, j) at (i h, (j+1/2) h), v(i, j) at ((i+1/2) h, j h), pressure at cell centers.
/// Gradient components follow the box convention: du/dx, dv/dy at cell centers and
/// du/dy, dv/dx at corners (i h, j h). The viscous energy form is the periodic analogue
/// of ViscousOperator, so uniform gradients see the cell-mean tensor exactly.
///
/// For a macroscopic gradient xi the corrector chi_xi is the zero-mean divergence-free
/// periodic field with
///     -div(A0 (xi + grad chi)) + grad p = 0,
/// and C0 xi is the cell mean of A0 (xi + grad chi_xi).

#pragma once

#include "nlsv/coefficient.hpp"
#include "nlsv/core.hpp"
#include "nlsv/transforms.hpp"

#include <array>
#include <memory>
#include <vector>

namespace nlsv {

// ============================================================================
// Periodic fields and operators
// ============================================================================

struct PeriodicVector {
    int m = 0;
    std::vector<double> u, v;

    PeriodicVector() = default;
    explicit PeriodicVector(int n) : m(n), u(static_cast<std::size_t>(n) * n, 0.0), v(u) {}

    std::size_t idx(int i, int j) const {
        const int ii = ((i % m) + m) % m, jj = ((j % m) + m) % m;
        return static_cast<std::size_t>(jj) * m + ii;
    }
    PeriodicVector& axpy(double a, const PeriodicVector& o);
    PeriodicVector& operator*=(double s);
    double max_abs() const;
    /// Mean of the u and v components.
    Vec2 mean() const;
    /// Sum of products (no cell-area factor).
    friend double dot(const PeriodicVector& a, const PeriodicVector& b);
};

/// Gradient components at native periodic locations: 0 = du/dx (cells), 1 = du/dy
/// (corners), 2 = dv/dx (corners), 3 = dv/dy (cells). Corner (i, j) shares the index of
/// cell (i, j).
struct PeriodicGradient {
    int m = 0;
    std::array<std::vector<double>, 4> g;

    PeriodicGradient() = default;
    explicit PeriodicGradient(int n);
    /// Uniform gradient with components xi (flat Mat2 order).
    static PeriodicGradient uniform(int n, const Mat2& xi);
    PeriodicGradient& axpy(double a, const PeriodicGradient& o);
    /// Component means as a Mat2.
    Mat2 mean() const;
};

PeriodicGradient periodic_gradient(const PeriodicVector& w);
/// Adjoint of periodic_gradient in the plain sum inner products (returns -div S).
PeriodicVector periodic_gradient_transpose(const PeriodicGradient& S);
std::vector<double> periodic_divergence(const PeriodicVector& w);

/// Variable-coefficient periodic viscous operator with symmetrized cell tensors.
class PeriodicViscous {
public:
    PeriodicViscous(int m, std::vector<Tensor4> cells);

    int m() const { return m_; }
    PeriodicGradient stress(const PeriodicGradient& G) const;
    PeriodicVector apply(const PeriodicVector& w) const;
    double mean_diffusivity() const;
    Tensor4 mean_tensor() const;

private:
    int m_;
    std::vector<Tensor4> cells_;
    std::vector<std::array<double, 4>> corner_;
};

/// Leray projector on periodic fields: w <- w - grad phi with D grad phi = D w.
class PeriodicProjector {
public:
    explicit PeriodicProjector(int m);
    /// Projects w in place and returns phi (zero mean).
    std::vector<double> project(PeriodicVector& w);

private:
    int m_;
    PeriodicHelmholtz poisson_;
};

// ============================================================================
// Cell problem
// ============================================================================

struct CellProblemSpec {
    OscillatoryCoefficient A0;
    OscillatoryCoefficient A1;  ///< may be the zero coefficient
    int n_cell = 64;
    double alpha = 1.0;
    Vec2 x0{0.5, 0.5};  ///< macroscopic point at which x-dependent coefficients are frozen
    double tol = 1e-12;

    void validate() const;
};

/// Cell tensors of A(t, x0, y) at the cell centers of the unit-cell grid.
std::vector<Tensor4> sample_cell_tensors(const OscillatoryCoefficient& A, double t, Vec2 x0, int m);

struct CellSolution {
    PeriodicVector chi;
    std::vector<double> p;
    double relative_residual = 0.0;
    int iterations = 0;
};

/// Corrector for one macroscopic gradient xi (A1 decoupled).
CellSolution solve_cell_problem(const CellProblemSpec& spec, const Mat2& xi);

/// Correctors for the four basis matrices E_b (flat Mat2 order).
struct Corrector {
    int m = 0;
    std::array<PeriodicVector, 4> chi;
    std::array<std::vector<double>, 4> p;
    std::array<double, 4> residual{};

    /// chi_xi(y) = sum_b xi_b chi_b(y), periodic bilinear interpolation.
    Vec2 evaluate(const Mat2& xi, Vec2 y) const;
    /// Max |chi| over all basis fields.
    double max_abs() const;
};

/// Solves the four basis problems; workers > 1 runs them on separate threads.
Corrector compute_correctors(const CellProblemSpec& spec, int workers = 1);

/// Column b of C0 is the cell mean of A0 (E_b + grad chi_b).
Tensor4 effective_C0(const CellProblemSpec& spec, const Corrector& corr);
/// Cell mean M(A0) of the instantaneous coefficient (Voigt bound).
Tensor4 mean_coefficient(const CellProblemSpec& spec);
/// C1(t_n) = cell mean of A1(t_n) (E_b + grad chi_b), t_n = n dt, n = 0..steps.
std::vector<Tensor4> effective_C1(const CellProblemSpec& spec, const Corrector& corr, double dt, int steps);

/// Time-coupled cell problem driven by the impulse xi_0 = xi, xi_n = 0 (n >= 1). At step
/// n the corrector solves the cell problem with the memory stress
/// sum_{m<n} c_m dt A1(t_n - t_m)(xi_m + grad chi^m), c_0 = 1/2, c_m = 1 otherwise, and
/// sigma^n is the cell mean of A0 (xi_n + grad chi^n) plus that memory stress.
std::vector<Mat2> volterra_impulse_response(const CellProblemSpec& spec, const Mat2& xi, double dt, int steps);

/// Kernel read off an impulse response: K_n = sigma^n / (dt / 2) for n >= 1, K_0 = 0.
std::vector<Mat2> impulse_kernel(const std::vector<Mat2>& sigma, double dt);

/// Quadratic form <C xi, eta> with C acting on flat Mat2 components.
double quadratic_form(const Tensor4& C, const Mat2& xi, const Mat2& eta);

}  // namespace nlsv
