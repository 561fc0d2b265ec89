/// @file nlsv.cpp
/// @brief Command-line front end: simulate, cell, homogenize, converge and check.

#include "nlsv/acceptance.hpp"
#include "nlsv/runs.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string scenario;
    int workers = 1;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "Configuration file (key = value lines)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "Output directory (overrides out_dir)");
    sub->add_option("--scenario", c.scenario, "Scenario name (overrides scenario)");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

nlsv::RunConfig resolve_config(const Common& c) {
    nlsv::RunConfig cfg = nlsv::load_config(c.config);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (!c.scenario.empty()) cfg.scenario = c.scenario;
    cfg.validate();
    return cfg;
}

int report(const nlsv::RunAudit& a, nlsv::OutputDir& out) {
    out.write_text("audit.txt", a.passed() ? "PASS\n" : [&] {
        std::string s = "FAIL\n";
        for (const auto& f : a.failures) s += f + "\n";
        return s;
    }());
    out.write_manifest();
    for (const auto& f : a.failures) std::cerr << "audit: " << f << '\n';
    std::cout << (a.passed() ? "audits passed" : "audits FAILED") << " (" << out.root() << ")\n";
    return a.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vlasov / nonlocal Stokes homogenization toolkit"};
    app.require_subcommand(1);

    Common sim, cell, hom, conv, chk;
    auto* s_sim = app.add_subcommand("simulate", "Fine-scale coupled run at the first eps");
    add_common(s_sim, sim, true);
    auto* s_cell = app.add_subcommand("cell", "Cell problem: writes C0.csv and C1.csv");
    add_common(s_cell, cell, true);
    auto* s_hom = app.add_subcommand("homogenize", "Homogenized run from C0/C1 CSV files");
    add_common(s_hom, hom, true);
    std::string c0_csv, c1_csv;
    s_hom->add_option("--c0", c0_csv, "C0.csv from the cell subcommand")->required()->check(CLI::ExistingFile);
    s_hom->add_option("--c1", c1_csv, "C1.csv from the cell subcommand")->required()->check(CLI::ExistingFile);
    auto* s_conv = app.add_subcommand("converge", "eps-refinement convergence study");
    add_common(s_conv, conv, true);
    auto* s_chk = app.add_subcommand("check", "Acceptance suite");
    add_common(s_chk, chk, false);
    std::vector<int> only;
    s_chk->add_option("--only", only, "Criterion ids to run (default: all)")->check(CLI::Range(1, 11));

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_chk->parsed()) {
            nlsv::AcceptanceOptions opts;
            opts.workers = chk.workers;
            const bool ok = nlsv::run_acceptance(only, opts, [](const nlsv::CriterionResult& r) {
                std::cout << nlsv::format_result(r) << std::endl;
            });
            return ok ? 0 : 1;
        }
        if (s_sim->parsed()) {
            const nlsv::RunConfig cfg = resolve_config(sim);
            nlsv::OutputDir out(cfg.out_dir, nlsv::config_hash(cfg));
            return report(nlsv::run_simulation(cfg, out), out);
        }
        if (s_cell->parsed()) {
            const nlsv::RunConfig cfg = resolve_config(cell);
            nlsv::OutputDir out(cfg.out_dir, nlsv::config_hash(cfg));
            return report(nlsv::run_cell(cfg, out, cell.workers), out);
        }
        if (s_hom->parsed()) {
            const nlsv::RunConfig cfg = resolve_config(hom);
            nlsv::OutputDir out(cfg.out_dir, nlsv::config_hash(cfg));
            return report(nlsv::run_homogenized(cfg, c0_csv, c1_csv, out), out);
        }
        if (s_conv->parsed()) {
            const nlsv::RunConfig cfg = resolve_config(conv);
            nlsv::OutputDir out(cfg.out_dir, nlsv::config_hash(cfg));
            const nlsv::ConvergenceTable t = nlsv::run_convergence_study(cfg, conv.workers);
            out.write_text("convergence.csv", nlsv::convergence_csv(t));
            out.write_text("timings.csv", nlsv::timings_csv(t));
            out.write_text("C0.csv", nlsv::tensor_csv({t.tensors.C0}, 0.0));
            out.write_text("C1.csv", nlsv::tensor_csv(t.tensors.C1_seq, t.tensors.dt));
            out.write_text("config.txt", nlsv::serialize_config(cfg));
            nlsv::RunAudit a;
            if (!t.error.empty()) a.fail(t.error);
            for (std::size_t k = 0; k < t.rows.size(); ++k)
                if (!t.rows[k].done) a.fail("no result for eps = " + std::to_string(cfg.eps_list[k]));
            std::cout << nlsv::convergence_csv(t) << nlsv::timings_csv(t);
            return report(a, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
