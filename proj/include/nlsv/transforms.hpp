/// @file transforms.hpp
/// @brief FFTW-backed fast solvers for the constant-coefficient operators on the MAC grid.
///
/// Each solver owns its plans and a scratch buffer; plans are created under a global
/// mutex (FFTW's planner is not thread safe) and executed with the new-array interface.

#pragma once

#include <memory>
#include <vector>

namespace nlsv {

/// 1D symbol of the second-difference operator: (2 - 2 cos(theta)) / h^2.
double laplacian_symbol(double theta, double h);

/// Solves D G phi = rhs for a cell-centered phi with homogeneous Neumann conditions
/// (DCT-II / DCT-III). The mean of rhs is discarded and phi has zero mean.
class NeumannPoisson {
public:
    NeumannPoisson(int nx, int ny, double dx, double dy);
    ~NeumannPoisson();
    NeumannPoisson(const NeumannPoisson&) = delete;
    NeumannPoisson& operator=(const NeumannPoisson&) = delete;

    /// In place, row-major (index j*nx + i).
    void solve(std::vector<double>& data);

private:
    struct Plans;
    int nx_, ny_;
    std::vector<double> eig_;
    std::unique_ptr<Plans> plans_;
};

/// Solves (sigma + tau * (-Delta_h)) x = r on the interior nodes of one MAC velocity
/// component with homogeneous Dirichlet walls. Node-based directions use DST-I; the
/// cell-centered direction (ghost reflection at the wall) uses DST-II / DST-III.
class DirichletHelmholtz {
public:
    /// n_node / n_cell: number of interior unknowns in the node-based and cell-centered
    /// directions. node_dir_is_x selects which of the two is the row (x) direction.
    DirichletHelmholtz(int n_node, double h_node, int n_cell, double h_cell, bool node_dir_is_x);
    ~DirichletHelmholtz();
    DirichletHelmholtz(const DirichletHelmholtz&) = delete;
    DirichletHelmholtz& operator=(const DirichletHelmholtz&) = delete;

    /// In place, row-major over the interior block (rows = y direction).
    void solve(std::vector<double>& data, double sigma, double tau);

private:
    struct Plans;
    int rows_, cols_;
    std::vector<double> lam_rows_, lam_cols_;
    double norm_;
    std::unique_ptr<Plans> plans_;
};

/// Solves (sigma + tau * (-Delta_h)) x = r on an m x m periodic grid with spacing h.
/// With sigma = 0 the zero mode of the solution is set to zero.
class PeriodicHelmholtz {
public:
    PeriodicHelmholtz(int m, double h);
    ~PeriodicHelmholtz();
    PeriodicHelmholtz(const PeriodicHelmholtz&) = delete;
    PeriodicHelmholtz& operator=(const PeriodicHelmholtz&) = delete;

    void solve(std::vector<double>& data, double sigma, double tau);

private:
    struct Plans;
    int m_;
    std::vector<double> lam_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace nlsv
