/// @file particles.hpp
/// @brief Weighted deterministic particle ensembles for the kinetic density f(t, x, v).
///
/// Characteristics: dx/dt = eps v, dv/dt = U - v. With U frozen over a step the update
/// is exact; walls reflect specularly.

#pragma once

#include "nlsv/fields.hpp"

#include <array>
#include <functional>
#include <vector>

namespace nlsv {

// ============================================================================
// Ensemble
// ============================================================================

/// Structure-of-arrays particle storage.
struct ParticleEnsemble {
    std::vector<double> x, y, vx, vy, w;

    std::size_t size() const { return w.size(); }
    bool empty() const { return w.empty(); }
    void reserve(std::size_t n);
    void add(Vec2 pos, Vec2 vel, double weight);
    Vec2 position(std::size_t k) const { return {x[k], y[k]}; }
    Vec2 velocity(std::size_t k) const { return {vx[k], vy[k]}; }
};

struct Moments {
    double mass = 0.0;
    Vec2 momentum;
    double kinetic_energy = 0.0;  ///< (1/2) sum w |v|^2
    double second_moment = 0.0;   ///< sum w |v|^2
};

Moments moments(const ParticleEnsemble& ens);
double min_weight(const ParticleEnsemble& ens);

// ============================================================================
// Regularization
// ============================================================================

struct RegularizationParams {
    double lambda = 0.0;   ///< 0 disables mollification and truncation
    int quad_points = 6;   ///< per-dimension points of the mollifier quadrature

    bool active() const { return lambda > 0.0; }
    void validate() const;  ///< requires 0 <= lambda <= 1 and quad_points >= 2
};

/// Smooth step: 1 on [0,1], 0 on [2,inf), monotone in between (C-infinity).
double truncation_profile(double r);
/// gamma_lambda(v) = truncation_profile(lambda |v|); identically 1 for lambda = 0.
double truncation(Vec2 v, double lambda);

/// Normalized 2D bump theta(z) = c exp(-1/(1-|z|^2)) on the unit disk.
double mollifier(Vec2 z);
double mollifier_normalization();

/// Quadrature of the unit-disk mollifier: nodes z_q with weights summing to 1.
struct MollifierQuadrature {
    std::vector<Vec2> nodes;
    std::vector<double> weights;
    explicit MollifierQuadrature(int n = 6);
};

using PhaseDensity = std::function<double(Vec2 x, Vec2 v)>;

struct InitialData {
    PhaseDensity f0;
    VectorField u0;
    double vmax = 4.0;
};

/// (x, v) -> gamma_lambda(v) (f0 * Theta_lambda)(x, v) with f0 extended by zero outside
/// the domain [0,Lx]x[0,Ly]. Returns f0 unchanged when lambda = 0.
PhaseDensity regularize_initial(const PhaseDensity& f0, const RegularizationParams& params, double Lx = 1.0,
                                double Ly = 1.0);

/// Midpoint tensor lattice over [0,Lx]x[0,Ly]x[-vmax,vmax]^2 with counts
/// (nx, ny, nvx, nvy); w = f0 * cell volume; zero-weight particles are dropped.
ParticleEnsemble init_from_density(const PhaseDensity& f0, const std::array<int, 4>& lattice, double vmax,
                                   double Lx = 1.0, double Ly = 1.0);

/// Keeps the max_count heaviest particles (ties broken by index), preserving order.
void thin_ensemble(ParticleEnsemble& ens, std::size_t max_count);

// ============================================================================
// Transport
// ============================================================================

enum class Wall { Left, Right, Bottom, Top };

struct Reflection {
    Vec2 x;
    Vec2 v;
};

/// Mirrors x across the wall and negates the wall-normal velocity component.
Reflection specular_reflect(Vec2 x, Vec2 v, Wall wall, double Lx = 1.0, double Ly = 1.0);

/// Folds a position back into the closed box by successive mirror reflections,
/// flipping the matching velocity components. Returns the number of reflections.
int fold_into_box(double& x, double& y, double& vx, double& vy, double Lx, double Ly);

/// Fluid velocity seen by each particle: u(x_k), or (u * theta_lambda)(x_k) with u
/// extended by zero outside the domain when lambda > 0.
std::vector<Vec2> particle_velocity(const ParticleEnsemble& ens, const VectorField& u, double lambda = 0.0);

struct PushReport {
    double cfl = 0.0;  ///< eps max|v| dt / min(dx, dy)
    bool cfl_ok = true;
    int reflections = 0;
};

/// Exact relaxation step with frozen U_k: v <- U + (v-U)e^{-dt},
/// x <- x + eps [U dt + (v_old - U)(1 - e^{-dt})], then specular folding.
PushReport push_with_velocity(ParticleEnsemble& ens, const std::vector<Vec2>& U, double eps, double dt,
                              double Lx = 1.0, double Ly = 1.0, double h_min = 0.0);

PushReport push_particles(ParticleEnsemble& ens, const VectorField& u, double eps, double dt);

/// Deposits per-particle vectors q_k onto the MAC nodes (divided by the cell area). With
/// lambda > 0 each deposit is spread with the mollifier quadrature (adjoint of
/// particle_velocity); nodes outside the domain receive nothing.
VectorField deposit_vectors(const GridSpec& g, const ParticleEnsemble& ens, const std::vector<Vec2>& q,
                            double lambda = 0.0);

/// Field of -sum_k w_k (u(x_k) - v_k) deposited with the interpolation kernel.
VectorField deposit_drag(const ParticleEnsemble& ens, const VectorField& u);

/// Cell-centered number density of the ensemble (integral of f over v).
ScalarField density_field(const GridSpec& g, const ParticleEnsemble& ens);

// ============================================================================
// Phase volume
// ============================================================================

using PhasePoint = std::array<double, 4>;  // (x, y, vx, vy)

/// Absolute 4-volume of the simplex spanned by five phase points; 0 when degenerate
/// (|det| below 1e-14 times the product of edge lengths).
double phase_volume(const std::array<PhasePoint, 5>& simplex);

/// Determinant of a 4x4 matrix by partial-pivot elimination.
double det4(std::array<std::array<double, 4>, 4> m);

}  // namespace nlsv
