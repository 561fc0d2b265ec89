#include "nlsv/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace nlsv {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double laplacian_symbol(double theta, double h) {
    const double s = std::sin(0.5 * theta);
    return 4.0 * s * s / (h * h);
}

// ============================================================================
// NeumannPoisson
// ============================================================================

struct NeumannPoisson::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> buf;
};

NeumannPoisson::NeumannPoisson(int nx, int ny, double dx, double dy)
    : nx_(nx), ny_(ny), eig_(static_cast<std::size_t>(nx) * ny), plans_(std::make_unique<Plans>()) {
    const double pi = std::numbers::pi;
    for (int l = 0; l < ny; ++l)
        for (int k = 0; k < nx; ++k)
            eig_[static_cast<std::size_t>(l) * nx + k] =
                laplacian_symbol(pi * k / nx, dx) + laplacian_symbol(pi * l / ny, dy);
    plans_->buf.assign(eig_.size(), 0.0);
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* b = plans_->buf.data();
    plans_->fwd = fftw_plan_r2r_2d(ny, nx, b, b, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_r2r_2d(ny, nx, b, b, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
}

NeumannPoisson::~NeumannPoisson() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->inv);
}

void NeumannPoisson::solve(std::vector<double>& data) {
    auto& b = plans_->buf;
    b = data;
    fftw_execute_r2r(plans_->fwd, b.data(), b.data());
    const double norm = 4.0 * nx_ * ny_;
    b[0] = 0.0;
    for (std::size_t k = 1; k < b.size(); ++k) b[k] = -b[k] / (eig_[k] * norm);
    fftw_execute_r2r(plans_->inv, b.data(), b.data());
    data = b;
}

// ============================================================================
// DirichletHelmholtz
// ============================================================================

struct DirichletHelmholtz::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> buf;
};

DirichletHelmholtz::DirichletHelmholtz(int n_node, double h_node, int n_cell, double h_cell,
                                       bool node_dir_is_x)
    : plans_(std::make_unique<Plans>()) {
    const double pi = std::numbers::pi;
    // Node direction: n_node interior unknowns between two Dirichlet nodes, DST-I.
    std::vector<double> lam_node(n_node), lam_cell(n_cell);
    for (int k = 0; k < n_node; ++k) lam_node[k] = laplacian_symbol(pi * (k + 1) / (n_node + 1), h_node);
    for (int k = 0; k < n_cell; ++k) lam_cell[k] = laplacian_symbol(pi * (k + 1) / n_cell, h_cell);
    fftw_r2r_kind node_f = FFTW_RODFT00, node_i = FFTW_RODFT00;
    fftw_r2r_kind cell_f = FFTW_RODFT10, cell_i = FFTW_RODFT01;
    fftw_r2r_kind row_f, row_i, col_f, col_i;
    if (node_dir_is_x) {
        cols_ = n_node;
        rows_ = n_cell;
        lam_cols_ = lam_node;
        lam_rows_ = lam_cell;
        col_f = node_f; col_i = node_i;
        row_f = cell_f; row_i = cell_i;
        norm_ = 2.0 * (n_node + 1) * 2.0 * n_cell;
    } else {
        cols_ = n_cell;
        rows_ = n_node;
        lam_cols_ = lam_cell;
        lam_rows_ = lam_node;
        col_f = cell_f; col_i = cell_i;
        row_f = node_f; row_i = node_i;
        norm_ = 2.0 * (n_node + 1) * 2.0 * n_cell;
    }
    plans_->buf.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* b = plans_->buf.data();
    plans_->fwd = fftw_plan_r2r_2d(rows_, cols_, b, b, row_f, col_f, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_r2r_2d(rows_, cols_, b, b, row_i, col_i, FFTW_ESTIMATE);
}

DirichletHelmholtz::~DirichletHelmholtz() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->inv);
}

void DirichletHelmholtz::solve(std::vector<double>& data, double sigma, double tau) {
    auto& b = plans_->buf;
    b = data;
    fftw_execute_r2r(plans_->fwd, b.data(), b.data());
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
            const std::size_t k = static_cast<std::size_t>(r) * cols_ + c;
            b[k] /= (sigma + tau * (lam_rows_[r] + lam_cols_[c])) * norm_;
        }
    fftw_execute_r2r(plans_->inv, b.data(), b.data());
    data = b;
}

// ============================================================================
// PeriodicHelmholtz
// ============================================================================

struct PeriodicHelmholtz::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> real;
    std::vector<std::complex<double>> spec;
};

PeriodicHelmholtz::PeriodicHelmholtz(int m, double h) : m_(m), plans_(std::make_unique<Plans>()) {
    const int mc = m / 2 + 1;
    lam_.resize(static_cast<std::size_t>(m) * mc);
    const double pi = std::numbers::pi;
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < mc; ++k)
            lam_[static_cast<std::size_t>(l) * mc + k] =
                laplacian_symbol(2.0 * pi * k / m, h) + laplacian_symbol(2.0 * pi * l / m, h);
    plans_->real.assign(static_cast<std::size_t>(m) * m, 0.0);
    plans_->spec.assign(static_cast<std::size_t>(m) * mc, {0.0, 0.0});
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* s = reinterpret_cast<fftw_complex*>(plans_->spec.data());
    plans_->fwd = fftw_plan_dft_r2c_2d(m, m, plans_->real.data(), s, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_dft_c2r_2d(m, m, s, plans_->real.data(), FFTW_ESTIMATE);
}

PeriodicHelmholtz::~PeriodicHelmholtz() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->inv);
}

void PeriodicHelmholtz::solve(std::vector<double>& data, double sigma, double tau) {
    auto& r = plans_->real;
    auto& s = plans_->spec;
    r = data;
    auto* sp = reinterpret_cast<fftw_complex*>(s.data());
    fftw_execute_dft_r2c(plans_->fwd, r.data(), sp);
    const double norm = static_cast<double>(m_) * m_;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double d = sigma + tau * lam_[k];
        s[k] = (d == 0.0) ? std::complex<double>(0.0, 0.0) : s[k] / (d * norm);
    }
    fftw_execute_dft_c2r(plans_->inv, sp, r.data());
    data = r;
}

}  // namespace nlsv
