/// @file runs.hpp
/// @brief Run orchestration for the CLI: fine-scale simulation, cell problem, homogenized
/// run and the eps-refinement convergence study.

#pragma once

#include "nlsv/config.hpp"
#include "nlsv/homogenized.hpp"
#include "nlsv/scenarios.hpp"
#include "nlsv/snapshot_io.hpp"

#include <string>
#include <vector>

namespace nlsv {

/// Scenario with the config's coefficient and initial-data overrides applied.
Scenario resolve_scenario(const RunConfig& cfg);
/// Regularized, lattice-sampled and thinned initial ensemble (empty when f0 is absent).
ParticleEnsemble build_particles(const RunConfig& cfg, const Scenario& sc);
VectorField build_u0(const RunConfig& cfg, const Scenario& sc, const GridSpec& g);

struct RunAudit {
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
    void fail(const std::string& what) { failures.push_back(what); }
};

/// Per-step invariant audits shared by the fine and homogenized runs: divergence,
/// boundary values, pressure mean, mass, weights, ledger finiteness, energy inequality and
/// drag L1 bound.
class StepAuditor {
public:
    StepAuditor(const CoupledSystem& sys, double alpha, double tol_ledger);
    void check(const CoupledSystem& sys, const StepDiagnostics& d);
    const RunAudit& audit() const { return audit_; }

private:
    RunAudit audit_;
    double alpha_;
    double tol_ledger_;
    double mass0_;
    double energy0_;
};

/// Fine-scale coupled run at eps = eps_list.front(); writes energy.csv, moments.csv and
/// snapshots at the configured stride.
RunAudit run_simulation(const RunConfig& cfg, OutputDir& out);

/// Cell problem: writes C0.csv and C1.csv and audits the effective tensors.
RunAudit run_cell(const RunConfig& cfg, OutputDir& out, int workers = 1);

/// Homogenized run from C0/C1 CSV files.
RunAudit run_homogenized(const RunConfig& cfg, const std::string& c0_csv, const std::string& c1_csv, OutputDir& out);

struct ConvergenceRow {
    double eps = 0.0;
    double err_plain = 0.0;        ///< ||u_eps - u0||_{L2(Q)}
    double err_reconstructed = 0.0;  ///< ||u_eps - (u0 + eps chi)||_{L2(Q)}
    double moment_gap = 0.0;       ///< ||rho_eps - rho||_{L2(Q)} on the coarse moment grid
    double runtime = 0.0;          ///< seconds
    bool done = false;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double homogenized_norm = 0.0;  ///< ||u0||_{L2(Q)}
    double homogenized_runtime = 0.0;
    EffectiveTensors tensors;
    std::string error;  ///< first sub-run failure; rows after it may be missing
};

/// Effective tensors, one homogenized run, then one fine run per eps (parallel over eps
/// with `workers` threads; each row is computed by a single thread, so results do not
/// depend on the worker count). A failing row stops the study; completed rows are kept.
ConvergenceTable run_convergence_study(const RunConfig& cfg, int workers = 1);

/// Error table (eps, err_plain, err_reconstructed, moment_gap); deterministic.
std::string convergence_csv(const ConvergenceTable& t);
/// Wall-clock runtimes of the homogenized run and each fine run.
std::string timings_csv(const ConvergenceTable& t);

}  // namespace nlsv
