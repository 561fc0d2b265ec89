/// @file operator_s.hpp
/// @brief Solution map S: given a velocity trajectory w, push the regularized ensemble
/// against w * theta_lambda, build the truncated drag and the memory term from grad w,
/// and step the Stokes solver. Picard iteration on S.

#pragma once

#include "nlsv/coupled.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace nlsv {

/// Velocities at t_0 .. t_N.
using Trajectory = std::vector<VectorField>;

/// Trapezoidal time sum dt * sum c_n ||a^n||^2 (L2(Q)).
double l2q_norm_sq(const Trajectory& a, double dt);
/// Trapezoidal time sum dt * sum c_n ||grad a^n||^2 (L2(0,T;V)).
double l2v_norm_sq(const Trajectory& a, double dt);
/// ||a - b||_{L2(Q)}.
double l2q_distance(const Trajectory& a, const Trajectory& b, double dt);

struct SProblem {
    std::shared_ptr<StokesSolver> solver;
    VectorField u0;
    ParticleEnsemble particles;  ///< regularized initial ensemble
    double eps = 1.0;
    RegularizationParams reg;
    int steps = 0;
};

class OperatorS {
public:
    explicit OperatorS(SProblem problem);

    /// S(w); w must hold steps + 1 frames on the solver grid.
    Trajectory apply(const Trajectory& w) const;
    /// The zero trajectory on the problem's time grid.
    Trajectory zero_trajectory() const;
    const SProblem& problem() const { return prob_; }

private:
    SProblem prob_;
};

struct PicardLogEntry {
    int iter = 0;
    double residual = 0.0;  ///< ||w^{k+1} - w^k||_{L2(Q)}
    double energy = 0.0;    ///< ||w^{k+1}||^2_{L2(Q)}
};

struct FixedPointResult {
    Trajectory trajectory;
    std::vector<PicardLogEntry> log;
    bool converged = false;
};

/// w^{k+1} = S(w^k) from w^0 = 0 until the residual drops to tol or max_iter is reached.
FixedPointResult fixed_point_solve(const OperatorS& S, double tol, int max_iter);

void write_picard_log(std::ostream& os, const std::vector<PicardLogEntry>& log);

}  // namespace nlsv
