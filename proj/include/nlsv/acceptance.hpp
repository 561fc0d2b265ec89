/// @file acceptance.hpp
/// @brief Acceptance suite: eleven property and oracle checks with fixed tolerances and
/// runtime budgets, shared by the `check` subcommand and the ctest driver.

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nlsv {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;      ///< measured quantities and thresholds
    double seconds = 0.0;
    double budget = 0.0;     ///< runtime budget in seconds (part of the criterion)
};

struct AcceptanceOptions {
    int workers = 1;  ///< threads for the independent eps runs and cell problems
};

/// Criterion ids 1..11.
std::vector<int> criterion_ids();
std::string criterion_title(int id);

/// Runs one criterion; exceptions thrown by the solvers become a FAIL with the message.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// "PASS C<id> <title> (<seconds> s) <detail>" or the FAIL form.
std::string format_result(const CriterionResult& r);

/// Runs the given criteria (all when empty), reporting each result as it completes.
/// Returns true when every criterion passed.
bool run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts,
                    const std::function<void(const CriterionResult&)>& report);

// ============================================================================
// Reference integrators used as oracles
// ============================================================================

/// Dense RK4 integration of c' = -a c - k z, z' = c - z (the reduced Volterra problem
/// c' = -a c - k int_0^t e^{-(t-s)} c(s) ds), c(0) = 1, z(0) = 0. Returns c at
/// t_n = n * dt_out, n = 0..n_out, using `substeps` RK4 steps per output interval.
std::vector<double> volterra_reference(double a, double k, double dt_out, int n_out, int substeps = 64);

}  // namespace nlsv
