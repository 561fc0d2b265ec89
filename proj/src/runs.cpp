#include "nlsv/runs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

namespace nlsv {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string energy_header() {
    return "step,t,fluid_ke,particle_ke,mass,second_moment,drag_dissipation,weighted_drag_dissipation,"
           "viscous_dissipation,drag_l1,drag_l1_bound,memory_credit,energy,ledger_total\n";
}

std::string energy_row(int step, double t, const EnergyReport& r, double alpha) {
    std::ostringstream os;
    os << step << ',' << num(t) << ',' << num(r.fluid_ke) << ',' << num(r.particle_ke) << ',' << num(r.mass) << ','
       << num(r.second_moment) << ',' << num(r.drag_dissipation_cum) << ',' << num(r.weighted_drag_dissipation_cum)
       << ',' << num(r.viscous_dissipation_cum) << ',' << num(r.drag_l1_cum) << ',' << num(r.drag_l1_bound()) << ','
       << num(r.memory_credit_cum) << ',' << num(r.energy()) << ',' << num(r.ledger_total(alpha)) << '\n';
    return os.str();
}

std::string moments_row(int step, double t, const ParticleEnsemble& ens) {
    const Moments m = moments(ens);
    std::ostringstream os;
    os << step << ',' << num(t) << ',' << num(m.mass) << ',' << num(m.momentum.x) << ',' << num(m.momentum.y) << ','
       << num(m.second_moment) << ',' << num(ens.empty() ? 0.0 : min_weight(ens)) << '\n';
    return os.str();
}

/// Runs `sys` for all steps with audits, CSV series and snapshots.
RunAudit drive(CoupledSystem& sys, const RunConfig& cfg, double alpha, OutputDir& out, const std::string& prefix) {
    StepAuditor auditor(sys, alpha, cfg.tol_ledger);
    std::string energy = energy_header() + energy_row(0, sys.time(), sys.energy_ledger(), alpha);
    std::string mom = "step,t,mass,momentum_x,momentum_y,second_moment,min_weight\n" + moments_row(0, sys.time(), sys.particles());
    auto snapshot = [&](int step) {
        if (cfg.snapshot_stride <= 0 || step % cfg.snapshot_stride != 0) return;
        char name[64];
        std::snprintf(name, sizeof name, "%sfield_%06d.bin", prefix.c_str(), step);
        write_field_snapshot(out.path(name), sys.fluid().u, sys.time());
        out.record(name);
        std::snprintf(name, sizeof name, "%sparticles_%06d.bin", prefix.c_str(), step);
        write_particle_snapshot(out.path(name), sys.particles(), sys.time());
        out.record(name);
    };
    snapshot(0);
    const int steps = sys.grid().steps();
    for (int n = 1; n <= steps; ++n) {
        const StepDiagnostics d = sys.step();
        auditor.check(sys, d);
        energy += energy_row(n, sys.time(), sys.energy_ledger(), alpha);
        mom += moments_row(n, sys.time(), sys.particles());
        snapshot(n);
    }
    out.write_text(prefix + "energy.csv", energy);
    out.write_text(prefix + "moments.csv", mom);
    return auditor.audit();
}

CellProblemSpec cell_spec(const RunConfig& cfg, const Scenario& sc) {
    CellProblemSpec s;
    s.A0 = sc.A0;
    s.A1 = sc.A1;
    s.n_cell = cfg.n_cell;
    s.alpha = sc.alpha;
    return s;
}

double sq_diff(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const double d = a.data()[k] - b.data()[k];
        s += d * d;
    }
    return s * a.grid().cell_area();
}

double sq_diff(const VectorField& a, const VectorField& b) {
    VectorField d = a;
    d -= b;
    return l2_norm_sq(d);
}

}  // namespace

// ============================================================================
// Setup
// ============================================================================

Scenario resolve_scenario(const RunConfig& cfg) {
    Scenario sc = scenario_by_name(cfg.scenario);
    if (!cfg.A0.empty()) {
        sc.A0 = coefficient_by_name(cfg.A0);
        sc.alpha = sc.A0.alpha;
    }
    if (!cfg.A1.empty()) sc.A1 = coefficient_by_name(cfg.A1);
    if (cfg.initial_f == "none") sc.f0 = {};
    if (cfg.initial_u == "zero") sc.u0 = [](const GridSpec& g) { return VectorField(g); };
    if (!(sc.alpha > 0.0)) throw ConfigError("instantaneous coefficient '" + sc.A0.name + "' is not coercive");
    return sc;
}

ParticleEnsemble build_particles(const RunConfig& cfg, const Scenario& sc) {
    if (!sc.f0) return {};
    RegularizationParams reg;
    reg.lambda = cfg.lambda;
    const PhaseDensity f = regularize_initial(sc.f0, reg, cfg.grid.Lx, cfg.grid.Ly);
    ParticleEnsemble ens = init_from_density(f, cfg.lattice, cfg.vmax, cfg.grid.Lx, cfg.grid.Ly);
    thin_ensemble(ens, cfg.max_particles);
    return ens;
}

VectorField build_u0(const RunConfig&, const Scenario& sc, const GridSpec& g) {
    return sc.u0 ? sc.u0(g) : VectorField(g);
}

// ============================================================================
// StepAuditor
// ============================================================================

StepAuditor::StepAuditor(const CoupledSystem& sys, double alpha, double tol_ledger)
    : alpha_(alpha), tol_ledger_(tol_ledger) {
    mass0_ = moments(sys.particles()).mass;
    energy0_ = sys.energy_ledger().energy();
}

void StepAuditor::check(const CoupledSystem& sys, const StepDiagnostics& d) {
    const int n = sys.steps_taken();
    auto fail = [&](const std::string& what) {
        if (audit_.failures.size() < 20) audit_.fail("step " + std::to_string(n) + ": " + what);
    };
    const StokesState& f = sys.fluid();
    if (d.fluid.max_divergence > 1e-8) fail("divergence " + num(d.fluid.max_divergence));
    if (f.u.boundary_max_abs() != 0.0) fail("nonzero boundary velocity");
    if (std::abs(f.p.mean()) > 1e-12 * std::max(1.0, f.p.max_abs())) fail("pressure mean " + num(f.p.mean()));
    const Moments m = moments(sys.particles());
    if (std::abs(m.mass - mass0_) > 1e-13 * std::max(mass0_, 1e-300) && mass0_ > 0.0) fail("mass drift");
    if (!sys.particles().empty() && min_weight(sys.particles()) < 0.0) fail("negative weight");
    const EnergyReport r = sys.energy_ledger();
    if (!r.finite_nonnegative()) fail("ledger entry not finite and nonnegative");
    const double dt = sys.grid().dt;
    if (r.ledger_total(alpha_) > energy0_ * (1.0 + tol_ledger_ * dt) + r.memory_credit_cum)
        fail("energy inequality: " + num(r.ledger_total(alpha_)) + " > " +
             num(energy0_ * (1.0 + tol_ledger_ * dt) + r.memory_credit_cum));
    if (r.drag_l1_cum > r.drag_l1_bound() * (1.0 + 1e-12) + 1e-300) fail("drag L1 bound");
}

// ============================================================================
// Runs
// ============================================================================

RunAudit run_simulation(const RunConfig& cfg, OutputDir& out) {
    const Scenario sc = resolve_scenario(cfg);
    const double eps = cfg.eps_list.front();
    const GridSpec g = cfg.fine_grid(eps);
    SolverOptions so;
    so.tol = cfg.solver_tol;
    auto solver = std::make_shared<StokesSolver>(g, sc.A0, MemoryKernel::from_coefficient(sc.A1, g, eps), eps, so);
    CoupledOptions opts;
    opts.eps = eps;
    opts.reg.lambda = cfg.lambda;
    opts.alpha = sc.alpha;
    CoupledSystem sys(solver, build_u0(cfg, sc, g), build_particles(cfg, sc), opts);
    RunAudit a = drive(sys, cfg, sc.alpha, out, "");
    out.write_text("config.txt", serialize_config(cfg));
    return a;
}

RunAudit run_cell(const RunConfig& cfg, OutputDir& out, int workers) {
    const Scenario sc = resolve_scenario(cfg);
    const HomogenizationResult h = homogenize(cell_spec(cfg, sc), cfg.grid.dt, cfg.grid.steps(), workers);
    out.write_text("C0.csv", tensor_csv({h.tensors.C0}, 0.0));
    out.write_text("C1.csv", tensor_csv(h.tensors.C1_seq, cfg.grid.dt));
    out.write_text("config.txt", serialize_config(cfg));
    RunAudit a;
    const TensorAudit ta = audit_effective_tensor(h.tensors.C0, h.mean_A0, sc.alpha);
    if (ta.max_asymmetry > 1e-8) a.fail("C0 asymmetry " + num(ta.max_asymmetry));
    if (ta.min_coercivity_margin < -1e-12) a.fail("C0 coercivity margin " + num(ta.min_coercivity_margin));
    if (ta.min_voigt_margin < -1e-12) a.fail("C0 exceeds the cell-mean bound by " + num(-ta.min_voigt_margin));
    for (int b = 0; b < 4; ++b) {
        if (h.corrector.residual[b] > 1e-8) a.fail("corrector residual " + num(h.corrector.residual[b]));
        const Vec2 mu = h.corrector.chi[b].mean();
        if (std::max(std::abs(mu.x), std::abs(mu.y)) > 1e-12) a.fail("corrector mean not zero");
        double div = 0.0;
        for (double x : periodic_divergence(h.corrector.chi[b])) div = std::max(div, std::abs(x));
        if (div > 1e-8) a.fail("corrector divergence " + num(div));
    }
    return a;
}

RunAudit run_homogenized(const RunConfig& cfg, const std::string& c0_csv, const std::string& c1_csv, OutputDir& out) {
    const Scenario sc = resolve_scenario(cfg);
    EffectiveTensors t;
    const auto c0 = load_tensor_csv(c0_csv);
    if (c0.size() != 1) throw ConfigError("'" + c0_csv + "' must hold exactly one tensor");
    t.C0 = c0.front();
    double dt1 = cfg.grid.dt;
    t.C1_seq = load_tensor_csv(c1_csv, &dt1);
    t.dt = t.C1_seq.size() > 1 ? dt1 : cfg.grid.dt;
    t.alpha = sc.alpha;
    const GridSpec& g = cfg.grid;
    CoupledSystem sys = make_homogenized_system(g, t, build_u0(cfg, sc, g), build_particles(cfg, sc),
                                                RegularizationParams{cfg.lambda, 6});
    const ParticleEnsemble start = sys.particles();
    RunAudit a = drive(sys, cfg, sc.alpha, out, "");
    if (start.x != sys.particles().x || start.y != sys.particles().y) a.fail("limit particle positions moved");
    out.write_text("config.txt", serialize_config(cfg));
    return a;
}

// ============================================================================
// Convergence study
// ============================================================================

ConvergenceTable run_convergence_study(const RunConfig& cfg, int workers) {
    const Scenario sc = resolve_scenario(cfg);
    const GridSpec g = cfg.grid;
    const int steps = g.steps();
    const double dt = g.dt;
    GridSpec coarse = g;
    coarse.nx = coarse.ny = cfg.moment_grid;
    const ParticleEnsemble p0 = build_particles(cfg, sc);
    ConvergenceTable table;

    auto t0 = std::chrono::steady_clock::now();
    const HomogenizationResult h = homogenize(cell_spec(cfg, sc), dt, steps, std::max(1, workers));
    table.tensors = h.tensors;
    std::vector<VectorField> U0;
    std::vector<ScalarField> rho0;
    {
        CoupledSystem hs = make_homogenized_system(g, h.tensors, build_u0(cfg, sc, g), p0, {cfg.lambda, 6});
        U0.push_back(hs.fluid().u);
        rho0.push_back(density_field(coarse, hs.particles()));
        hs.run(steps, [&](const CoupledSystem& s, const StepDiagnostics&) {
            U0.push_back(s.fluid().u);
            rho0.push_back(density_field(coarse, s.particles()));
        });
    }
    table.homogenized_runtime = seconds_since(t0);
    double nrm = 0.0;
    for (int n = 0; n <= steps; ++n) nrm += ((n == 0 || n == steps) ? 0.5 : 1.0) * dt * l2_norm_sq(U0[n]);
    table.homogenized_norm = std::sqrt(nrm);

    table.rows.resize(cfg.eps_list.size());
    auto run_row = [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        const double eps = cfg.eps_list[r];
        const GridSpec gf = cfg.fine_grid(eps);
        SolverOptions so;
        so.tol = cfg.solver_tol;
        auto solver = std::make_shared<StokesSolver>(gf, sc.A0, MemoryKernel::from_coefficient(sc.A1, gf, eps), eps, so);
        CoupledOptions opts;
        opts.eps = eps;
        opts.reg.lambda = cfg.lambda;
        opts.alpha = sc.alpha;
        CoupledSystem fs(solver, build_u0(cfg, sc, gf), p0, opts);
        double e_plain = 0.0, e_rec = 0.0, e_mom = 0.0;
        auto accumulate = [&](int n, const CoupledSystem& s) {
            const double c = ((n == 0 || n == steps) ? 0.5 : 1.0) * dt;
            e_plain += c * sq_diff(s.fluid().u, U0[n]);
            e_rec += c * sq_diff(s.fluid().u, corrector_reconstruction(U0[n], h.corrector, eps));
            e_mom += c * sq_diff(density_field(coarse, s.particles()), rho0[n]);
        };
        accumulate(0, fs);
        fs.run(steps, [&](const CoupledSystem& s, const StepDiagnostics&) { accumulate(s.steps_taken(), s); });
        ConvergenceRow& row = table.rows[r];
        row.eps = eps;
        row.err_plain = std::sqrt(e_plain);
        row.err_reconstructed = std::sqrt(e_rec);
        row.moment_gap = std::sqrt(e_mom);
        row.runtime = seconds_since(start);
        row.done = true;
    };
    const std::size_t nw = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), 1, cfg.eps_list.size());
    std::mutex err_mu;
    auto record_error = [&](const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (table.error.empty()) table.error = e.what();
    };
    if (nw == 1) {
        for (std::size_t r = 0; r < cfg.eps_list.size() && table.error.empty(); ++r) {
            try {
                run_row(r);
            } catch (const std::exception& e) {
                record_error(e);
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < cfg.eps_list.size(); r = next++) {
                    try {
                        run_row(r);
                    } catch (const std::exception& e) {
                        record_error(e);
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    return table;
}

std::string convergence_csv(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "eps,err_plain,err_reconstructed,moment_gap\n";
    for (const auto& r : t.rows)
        if (r.done)
            os << num(r.eps) << ',' << num(r.err_plain) << ',' << num(r.err_reconstructed) << ',' << num(r.moment_gap) << '\n';
    return os.str();
}

std::string timings_csv(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "run,eps,runtime_s\n";
    os << "homogenized,0," << num(t.homogenized_runtime) << '\n';
    for (const auto& r : t.rows)
        if (r.done) os << "fine," << num(r.eps) << ',' << num(r.runtime) << '\n';
    return os.str();
}

}  // namespace nlsv
