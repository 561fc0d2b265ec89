/// @file krylov.hpp
/// @brief Preconditioned conjugate gradients over an arbitrary vector type.

#pragma once

#include "nlsv/core.hpp"

#include <cmath>
#include <string>

namespace nlsv {

struct PcgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves A x = b for symmetric positive (semi)definite A on the subspace where b and
/// the iterates live. `dot` must be the inner product that makes A and M symmetric.
/// x holds the initial guess on entry. Throws SolverError on non-convergence.
template <class Vec, class ApplyA, class ApplyM, class Dot>
PcgResult pcg(ApplyA&& apply_a, ApplyM&& apply_m, Dot&& dot, const Vec& b, Vec& x, double tol, int max_iter,
              const std::string& what) {
    PcgResult res;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        x = b;
        return res;
    }
    Vec r = b;
    r.axpy(-1.0, apply_a(x));
    double rnorm = std::sqrt(dot(r, r));
    if (rnorm <= tol * bnorm) {
        res.relative_residual = rnorm / bnorm;
        return res;
    }
    Vec z = apply_m(r);
    Vec p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        Vec ap = apply_a(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw SolverError(what + ": operator not positive", rnorm / bnorm, it);
        const double alpha = rz / pap;
        x.axpy(alpha, p);
        r.axpy(-alpha, ap);
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= tol * bnorm) {
            res.iterations = it;
            res.relative_residual = rnorm / bnorm;
            return res;
        }
        z = apply_m(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        p *= beta;
        p.axpy(1.0, z);
    }
    throw SolverError(what + " did not converge", rnorm / bnorm, max_iter);
}

}  // namespace nlsv
