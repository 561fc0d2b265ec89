/// @file test_config_io_runs.cpp
/// @brief Configuration parsing, snapshot and tensor I/O, the manifest, scenarios and the
/// run orchestration (determinism, trivial homogenization).

#include "nlsv/runs.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nlsv;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "# minimal\n"
    "scenario = constant\n"
    "nx = 32\n"
    "ny = 32\n"
    "dt = 0.05\n"
    "T = 0.2\n"
    "eps = 0.5, 0.25   # two scales\n"
    "out_dir = out\n";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nlsv_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

// ============================================================================
// Config
// ============================================================================

TEST(Config, ParsesMinimalFile) {
    const RunConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.scenario, "constant");
    EXPECT_EQ(c.grid.nx, 32);
    ASSERT_EQ(c.eps_list.size(), 2u);
    EXPECT_DOUBLE_EQ(c.eps_list[1], 0.25);
    EXPECT_DOUBLE_EQ(c.grid.eps, 0.5);
}

TEST(Config, RoundTripIsIdentical) {
    RunConfig c = parse_config(kMinimal);
    c.lambda = 0.1;
    c.lattice = {8, 8, 4, 6};
    c.A1 = "exp-memory-kernel";
    const RunConfig back = parse_config(serialize_config(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, EmptyFileListsEveryRequiredKey) {
    const std::string e = error_of("");
    for (const auto& k : required_config_keys()) EXPECT_NE(e.find(k), std::string::npos) << k;
}

TEST(Config, NonReciprocalEpsNamesTheConstraint) {
    std::string text = kMinimal;
    text.replace(text.find("0.5, 0.25"), 9, "0.3");
    EXPECT_NE(error_of(text).find("1/eps must be an integer"), std::string::npos);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_NE(error_of(std::string(kMinimal) + "bogus = 1\n").find("cfg:9: unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of(std::string(kMinimal) + "nx = 8\n").find("duplicate key"), std::string::npos);
    EXPECT_NE(error_of(std::string(kMinimal) + "dt\n").find("cfg:9"), std::string::npos);
    EXPECT_NE(error_of("nx = abc\n").find("expected an integer"), std::string::npos);
}

TEST(Config, ResolutionAndOrderingConstraints) {
    std::string coarse = kMinimal;
    coarse.replace(coarse.find("0.5, 0.25"), 9, "0.5, 0.25, 0.125");
    EXPECT_NE(error_of(coarse).find("nx*eps >= 8"), std::string::npos);
    std::string unordered = kMinimal;
    unordered.replace(unordered.find("0.5, 0.25"), 9, "0.25, 0.5");
    EXPECT_NE(error_of(unordered).find("strictly decreasing"), std::string::npos);
}

// ============================================================================
// I/O
// ============================================================================

TEST(SnapshotIO, FieldAndParticleRoundTripBitwise) {
    const fs::path dir = scratch("snap");
    fs::create_directories(dir);
    const GridSpec g = test::grid(7);
    const VectorField u = test::random_field(g, 5);
    write_field_snapshot((dir / "f.bin").string(), u, 0.125);
    const auto [u2, t] = read_field_snapshot((dir / "f.bin").string());
    EXPECT_EQ(t, 0.125);
    EXPECT_EQ(u2.u_data(), u.u_data());
    EXPECT_EQ(u2.v_data(), u.v_data());
    EXPECT_EQ(u2.grid().nx, 7);

    ParticleEnsemble p;
    p.add({0.1, 0.2}, {0.3, -0.4}, 0.5);
    p.add({0.6, 0.7}, {-0.8, 0.9}, 1.5);
    write_particle_snapshot((dir / "p.bin").string(), p, 1.0);
    const auto [p2, tp] = read_particle_snapshot((dir / "p.bin").string());
    EXPECT_EQ(tp, 1.0);
    EXPECT_EQ(p2.x, p.x);
    EXPECT_EQ(p2.vy, p.vy);
    EXPECT_EQ(p2.w, p.w);
    EXPECT_THROW(read_particle_snapshot((dir / "f.bin").string()), ConfigError);
}

TEST(SnapshotIO, TensorCsvRoundTrip) {
    std::vector<Tensor4> seq(3);
    for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 16; ++k) seq[n].c[k] = 0.1 * n + k / 7.0;
    double dt = 0.0;
    const std::vector<Tensor4> back = parse_tensor_csv(tensor_csv(seq, 0.05), &dt);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_DOUBLE_EQ(dt, 0.05);
    for (int n = 0; n < 3; ++n) EXPECT_EQ(back[n].c, seq[n].c);
    EXPECT_THROW(parse_tensor_csv("t,c\n0,1,2\n"), ConfigError);
}

TEST(OutputDir, ManifestListsEveryArtifactWithChecksum) {
    const fs::path dir = scratch("manifest");
    OutputDir out(dir.string(), 0x1234);
    out.write_text("a.txt", "alpha\n");
    out.write_text("sub/b.txt", "beta\n");
    out.write_manifest();
    std::ifstream in(dir / "MANIFEST.txt");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "config_hash 0000000000001234");
    std::getline(in, line);
    EXPECT_EQ(line, "a.txt 6 " + hex64(file_checksum((dir / "a.txt").string())));
    std::getline(in, line);
    EXPECT_EQ(line.rfind("sub/b.txt 5 ", 0), 0u);
}

// ============================================================================
// Scenarios
// ============================================================================

TEST(Scenarios, AllBuiltinsResolve) {
    const GridSpec g = test::grid(16);
    for (const auto& name : scenario_names()) {
        const Scenario s = scenario_by_name(name);
        EXPECT_GT(s.alpha, 0.0) << name;
        const VectorField u0 = s.u0(g);
        EXPECT_LT(max_abs_divergence(u0), 1e-12) << name;
        EXPECT_EQ(u0.boundary_max_abs(), 0.0) << name;
        EXPECT_TRUE(audit_coefficient(s.A0, 200).passed()) << name;
    }
    EXPECT_THROW(scenario_by_name("nope"), ConfigError);
}

TEST(Scenarios, CloudDensityVanishesOutsideTheBall) {
    const PhaseDensity f = cloud_density({0.5, 0.5}, 0.2, 10.0, {0.0, 0.0}, 0.2);
    EXPECT_GT(f({0.5, 0.5}, {0.0, 0.0}), 0.0);
    EXPECT_EQ(f({0.75, 0.5}, {0.0, 0.0}), 0.0);
}

// ============================================================================
// Runs
// ============================================================================

namespace {

RunConfig tiny_study() {
    RunConfig c = parse_config(kMinimal);
    c.initial_f = "none";
    c.n_cell = 16;
    return c;
}

}  // namespace

TEST(Runs, NonOscillatoryStudyErrorsAtSolverTolerance) {
    const ConvergenceTable t = run_convergence_study(tiny_study(), 1);
    ASSERT_TRUE(t.error.empty());
    ASSERT_EQ(t.rows.size(), 2u);
    for (const auto& r : t.rows) {
        ASSERT_TRUE(r.done);
        EXPECT_LT(r.err_plain, 1e-9 * std::max(1.0, t.homogenized_norm));
        EXPECT_LT(r.err_reconstructed, 1e-9 * std::max(1.0, t.homogenized_norm));
    }
}

TEST(Runs, StudyIsDeterministicAcrossReruns) {
    RunConfig c = tiny_study();
    c.scenario = "sinusoidal-A0";
    c.initial_f = "scenario";
    c.lattice = {8, 8, 4, 4};
    const std::string a = convergence_csv(run_convergence_study(c, 2));
    const std::string b = convergence_csv(run_convergence_study(c, 2));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, convergence_csv(run_convergence_study(c, 1)));
}

TEST(Runs, SimulateWritesAuditedArtifacts) {
    RunConfig c = parse_config(kMinimal);
    c.scenario = "coupled-cloud";
    c.lattice = {8, 8, 4, 4};
    c.snapshot_stride = 2;
    c.out_dir = scratch("sim").string();
    OutputDir out(c.out_dir, config_hash(c));
    const RunAudit a = run_simulation(c, out);
    EXPECT_TRUE(a.passed()) << (a.failures.empty() ? "" : a.failures.front());
    out.write_manifest();
    for (const char* f : {"energy.csv", "moments.csv", "config.txt", "field_000000.bin", "particles_000004.bin"})
        EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / f)) << f;
    EXPECT_EQ(load_config((fs::path(c.out_dir) / "config.txt").string()), c);
}

TEST(Runs, CellThenHomogenizePipeline) {
    RunConfig c = parse_config(kMinimal);
    c.scenario = "exp-memory-kernel";
    c.lattice = {8, 8, 4, 4};
    c.n_cell = 16;
    c.out_dir = scratch("cell").string();
    OutputDir out(c.out_dir, config_hash(c));
    EXPECT_TRUE(run_cell(c, out, 2).passed());
    const std::vector<Tensor4> C1 = load_tensor_csv(out.path("C1.csv"));
    EXPECT_EQ(static_cast<int>(C1.size()), c.grid.steps() + 1);
    OutputDir hout(c.out_dir + "/hom", config_hash(c));
    const RunAudit a = run_homogenized(c, out.path("C0.csv"), out.path("C1.csv"), hout);
    EXPECT_TRUE(a.passed()) << (a.failures.empty() ? "" : a.failures.front());
}
