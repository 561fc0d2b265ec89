#include "nlsv/acceptance.hpp"

#include "nlsv/cell_problem.hpp"
#include "nlsv/coupled.hpp"
#include "nlsv/homogenized.hpp"
#include "nlsv/operator_s.hpp"
#include "nlsv/particles.hpp"
#include "nlsv/runs.hpp"
#include "nlsv/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

namespace nlsv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "FAILED ") << what;
    }
};

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

RunConfig base_config(const std::string& scenario, int n, double dt, double T, double eps) {
    RunConfig c;
    c.scenario = scenario;
    c.grid.nx = c.grid.ny = n;
    c.grid.dt = dt;
    c.grid.T = T;
    c.eps_list = {eps};
    c.grid.eps = eps;
    c.out_dir = "acceptance";
    return c;
}

/// Coupled system built from a config exactly as the CLI does.
CoupledSystem build_system(const RunConfig& cfg, double solver_tol) {
    const Scenario sc = resolve_scenario(cfg);
    const double eps = cfg.eps_list.front();
    const GridSpec g = cfg.fine_grid(eps);
    SolverOptions so;
    so.tol = solver_tol;
    auto solver = std::make_shared<StokesSolver>(g, sc.A0, MemoryKernel::from_coefficient(sc.A1, g, eps), eps, so);
    CoupledOptions opts;
    opts.eps = eps;
    opts.reg.lambda = cfg.lambda;
    opts.alpha = sc.alpha;
    return CoupledSystem(solver, build_u0(cfg, sc, g), build_particles(cfg, sc), opts);
}

template <class Fu, class Fv>
VectorField sample_field(const GridSpec& g, Fu fu, Fv fv) {
    VectorField out(g);
    for (int jj = 0; jj <= g.ny + 1; ++jj)
        for (int i = 0; i <= g.nx; ++i) out.u(i, jj) = fu(out.u_position(i, jj));
    for (int j = 0; j <= g.ny; ++j)
        for (int ii = 0; ii <= g.nx + 1; ++ii) out.v(ii, j) = fv(out.v_position(ii, j));
    out.zero_boundary();
    return out;
}

double observed_order(double coarse, double fine) {
    return std::log2(coarse / fine);
}

// ============================================================================
// C1 phase volume
// ============================================================================

Outcome phase_volume_law() {
    Outcome o;
    const double eps = 0.1, dt = 1e-3;
    const int n = 1000;
    const double t = n * dt;
    auto simplex_of = [](const ParticleEnsemble& e) {
        std::array<PhasePoint, 5> s{};
        for (int k = 0; k < 5; ++k) s[k] = {e.x[k], e.y[k], e.vx[k], e.vy[k]};
        return s;
    };
    auto seed_simplex = [] {
        ParticleEnsemble e;
        const PhasePoint p0{0.45, 0.52, 0.3, -0.2};
        const std::array<PhasePoint, 4> edge = {PhasePoint{0.05, 0.01, 0.0, 0.0}, PhasePoint{0.0, 0.05, 0.01, 0.0},
                                                PhasePoint{0.0, 0.0, 0.5, 0.1}, PhasePoint{0.1, 0.0, 0.0, 0.5}};
        e.add({p0[0], p0[1]}, {p0[2], p0[3]}, 1.0);
        for (const auto& d : edge) e.add({p0[0] + d[0], p0[1] + d[1]}, {p0[2] + d[2], p0[3] + d[3]}, 1.0);
        return e;
    };

    // Affine fluid velocity: the one-step map is affine with a constant Jacobian.
    const Mat2 B{0.3, -0.5, 0.4, -0.2};
    const Vec2 U0{0.2, -0.1}, c{0.5, 0.5};
    ParticleEnsemble ens = seed_simplex();
    const double V0 = phase_volume(simplex_of(ens));
    std::vector<Vec2> U(5);
    for (int s = 0; s < n; ++s) {
        for (int k = 0; k < 5; ++k) U[k] = U0 + B * (ens.position(k) - c);
        const PushReport r = push_with_velocity(ens, U, eps, dt);
        if (r.reflections != 0) o.require(false, "simplex reached a wall");
    }
    const double E = std::exp(-dt), a = -std::expm1(-dt), b = dt - a;
    std::array<std::array<double, 4>, 4> J{};
    J[0] = {1.0 + eps * b * B.xx, eps * b * B.xy, eps * a, 0.0};
    J[1] = {eps * b * B.yx, 1.0 + eps * b * B.yy, 0.0, eps * a};
    J[2] = {a * B.xx, a * B.xy, E, 0.0};
    J[3] = {a * B.yx, a * B.yy, 0.0, E};
    const double expected = V0 * std::pow(std::abs(det4(J)), n);
    const double rel = std::abs(phase_volume(simplex_of(ens)) - expected) / expected;
    o.require(rel <= 1e-9, "affine-field volume vs det(J)^n rel err " + sci(rel) + " (tol 1e-9)");

    // Uniform fluid velocity: velocity subspace contracts by e^{-2t}.
    ParticleEnsemble uni = seed_simplex();
    const std::array<PhasePoint, 5> s0 = simplex_of(uni);
    auto vel_area = [](const std::array<PhasePoint, 5>& s) {
        return 0.5 * std::abs((s[3][2] - s[0][2]) * (s[4][3] - s[0][3]) - (s[4][2] - s[0][2]) * (s[3][3] - s[0][3]));
    };
    const std::vector<Vec2> Uc(5, U0);
    for (int s = 0; s < n; ++s) push_with_velocity(uni, Uc, eps, dt);
    const double ratio = vel_area(simplex_of(uni)) / vel_area(s0);
    const double rel_v = std::abs(ratio - std::exp(-2.0 * t)) / std::exp(-2.0 * t);
    o.require(rel_v <= 1e-12, "velocity-area ratio vs e^{-2t} rel err " + sci(rel_v) + " (tol 1e-12)");
    const double vol_ratio = phase_volume(simplex_of(uni)) / phase_volume(s0);
    const double rel_4 = std::abs(vol_ratio - std::exp(-2.0 * t)) / std::exp(-2.0 * t);
    o.require(rel_4 <= 1e-12, "uniform-field 4-volume ratio vs e^{-2t} rel err " + sci(rel_4) + " (tol 1e-12)");
    return o;
}

// ============================================================================
// C2 mass and positivity
// ============================================================================

Outcome mass_and_positivity() {
    Outcome o;
    RunConfig cfg = base_config("coupled-cloud", 64, 1e-3, 2.0, 1.0 / 8.0);
    cfg.A1 = "zero";
    cfg.lattice = {64, 64, 64, 64};
    cfg.max_particles = 1000000;
    CoupledSystem sys = build_system(cfg, 1e-10);
    const std::size_t np = sys.particles().size();
    o.require(np > 0 && np <= 1000000, "particles " + std::to_string(np) + " (<= 1e6)");
    auto mass = [&] {
        double m = 0.0;
        for (double w : sys.particles().w) m += w;
        return m;
    };
    const double m0 = mass();
    double drift = 0.0, wmin = min_weight(sys.particles());
    const int steps = sys.grid().steps();
    for (int s = 0; s < steps; ++s) {
        sys.step();
        drift = std::max(drift, std::abs(mass() - m0) / m0);
        wmin = std::min(wmin, min_weight(sys.particles()));
    }
    o.require(steps == 2000, "steps " + std::to_string(steps));
    o.require(drift <= 1e-13, "max relative mass drift " + sci(drift) + " (tol 1e-13)");
    o.require(wmin >= 0.0, "min weight " + sci(wmin));
    return o;
}

// ============================================================================
// C3 specular reflection
// ============================================================================

Outcome specular_reflection() {
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> out_lo(-0.5, 0.0), out_hi(1.0, 1.5), vel(-3.0, 3.0), pos(0.0, 1.0),
        wide(-0.9, 1.9);
    const int cases = 100000;
    int speed_bad = 0, involution_bad = 0, fold_bad = 0;
    const Wall walls[4] = {Wall::Left, Wall::Right, Wall::Bottom, Wall::Top};
    for (int k = 0; k < cases; ++k) {
        const Wall w = walls[k % 4];
        Vec2 x{pos(rng), pos(rng)};
        if (w == Wall::Left) x.x = out_lo(rng);
        if (w == Wall::Right) x.x = out_hi(rng);
        if (w == Wall::Bottom) x.y = out_lo(rng);
        if (w == Wall::Top) x.y = out_hi(rng);
        const Vec2 v{vel(rng), vel(rng)};
        const Reflection r1 = specular_reflect(x, v, w);
        const Reflection r2 = specular_reflect(r1.x, r1.v, w);
        if (!same_bits(std::hypot(r1.v.x, r1.v.y), std::hypot(v.x, v.y))) ++speed_bad;
        if (!same_bits(r2.x.x, x.x) || !same_bits(r2.x.y, x.y) || !same_bits(r2.v.x, v.x) || !same_bits(r2.v.y, v.y))
            ++involution_bad;

        double fx = wide(rng), fy = wide(rng), fvx = v.x, fvy = v.y;
        fold_into_box(fx, fy, fvx, fvy, 1.0, 1.0);
        if (!(fx >= 0.0 && fx <= 1.0 && fy >= 0.0 && fy <= 1.0) || !same_bits(std::hypot(fvx, fvy), std::hypot(v.x, v.y)))
            ++fold_bad;
    }
    o.require(speed_bad == 0, std::to_string(speed_bad) + " of " + std::to_string(cases) + " speeds changed");
    o.require(involution_bad == 0, std::to_string(involution_bad) + " double reflections not the identity");
    o.require(fold_bad == 0, std::to_string(fold_bad) + " folds outside the box or with changed speed");
    return o;
}

// ============================================================================
// C4 energy inequality
// ============================================================================

Outcome energy_inequality() {
    Outcome o;
    for (double dt : {1.0 / 100.0, 1.0 / 200.0}) {
        RunConfig cfg = base_config("coupled-cloud", 32, dt, 1.0, 1.0 / 4.0);
        CoupledSystem sys = build_system(cfg, 1e-10);
        const double alpha = sys.options().alpha;
        const double E0 = sys.energy_ledger().energy();
        const double bound = E0 * (1.0 + 10.0 * dt);
        double worst = -1e300;
        int bad = 0;
        for (int s = 0; s < sys.grid().steps(); ++s) {
            sys.step();
            const double lhs = sys.energy_ledger().ledger_total(alpha);
            worst = std::max(worst, lhs / bound);
            if (!(lhs <= bound)) ++bad;
        }
        char dts[32];
        std::snprintf(dts, sizeof dts, "1/%d", static_cast<int>(std::lround(1.0 / dt)));
        o.require(bad == 0, std::string("dt ") + dts + ": max ledger/(E0(1+10dt)) " + sci(worst) + ", " +
                                std::to_string(bad) + " violating steps");
    }

    // Fluid alone with A1 = 0 and no forcing: |u^{n+1}|^2 + 2 dt alpha |grad u^{n+1}|^2 <= |u^n|^2.
    RunConfig cfg = base_config("coupled-cloud", 32, 1.0 / 100.0, 1.0, 1.0 / 4.0);
    cfg.A1 = "zero";
    cfg.initial_f = "none";
    CoupledSystem sys = build_system(cfg, 1e-13);
    const double alpha = sys.options().alpha;
    double worst = -1e300;
    for (int s = 0; s < sys.grid().steps(); ++s) {
        const double before = fluid_energy(sys.fluid().u);
        sys.step();
        const double after = fluid_energy(sys.fluid().u) + 2.0 * sys.grid().dt * alpha * gradient_norm_sq(sys.fluid().u);
        worst = std::max(worst, (after - before) / before);
    }
    o.require(worst <= 1e-10, "fluid-only per-step excess (relative) " + sci(worst) + " (tol 1e-10)");
    return o;
}

// ============================================================================
// C5 Picard iteration of S
// ============================================================================

Outcome fixed_point_harness() {
    Outcome o;
    RunConfig cfg = base_config("coupled-cloud", 16, 1.0 / 64.0, 0.25, 1.0 / 2.0);
    cfg.lambda = 0.1;
    cfg.lattice = {16, 16, 8, 8};
    const Scenario sc = resolve_scenario(cfg);
    const double eps = cfg.eps_list.front();
    const GridSpec g = cfg.fine_grid(eps);
    SolverOptions so;
    so.tol = 1e-12;
    SProblem p;
    p.solver = std::make_shared<StokesSolver>(g, sc.A0, MemoryKernel::from_coefficient(sc.A1, g, eps), eps, so);
    p.u0 = build_u0(cfg, sc, g);
    p.particles = build_particles(cfg, sc);
    p.eps = eps;
    p.reg.lambda = cfg.lambda;
    p.steps = g.steps();
    const FixedPointResult r = fixed_point_solve(OperatorS(std::move(p)), 1e-8, 30);
    bool monotone = true;
    for (std::size_t k = 1; k < r.log.size(); ++k) monotone = monotone && r.log[k].residual < r.log[k - 1].residual;
    const double last = r.log.empty() ? 0.0 : r.log.back().residual;
    o.require(r.converged, "converged in " + std::to_string(r.log.size()) + " iterations (max 30), final residual " +
                               sci(last) + " (tol 1e-8)");
    o.require(monotone, std::string("residual decay ") + (monotone ? "monotone" : "not monotone"));
    return o;
}

// ============================================================================
// C6 / C7 cell problem
// ============================================================================

Outcome trivial_cell() {
    Outcome o;
    const double alpha = 1.5;
    CellProblemSpec spec;
    spec.A0 = make_constant_coefficient(alpha);
    spec.A1 = make_zero_coefficient();
    spec.alpha = alpha;
    spec.n_cell = 64;
    const Corrector corr = compute_correctors(spec);
    const Tensor4 C0 = effective_C0(spec, corr);
    double dev = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) dev = std::max(dev, std::abs(C0(a, b) - (a == b ? alpha : 0.0)));
    o.require(corr.max_abs() <= 1e-12, "max |chi| " + sci(corr.max_abs()) + " (tol 1e-12)");
    o.require(dev <= 1e-10, "max |C0 - alpha Id| " + sci(dev) + " (tol 1e-10)");
    return o;
}

Outcome effective_tensor_audit(int workers) {
    Outcome o;
    for (const std::string name : {"sinusoidal-A0", "checkerboard-A0"}) {
        CellProblemSpec spec;
        spec.A0 = coefficient_by_name(name);
        spec.A1 = make_zero_coefficient();
        spec.alpha = spec.A0.alpha;
        spec.n_cell = 64;
        const Corrector corr = compute_correctors(spec, workers);
        const Tensor4 C0 = effective_C0(spec, corr);
        const TensorAudit a = audit_effective_tensor(C0, mean_coefficient(spec), spec.alpha, 100);
        o.require(a.max_asymmetry <= 1e-8, name + ": asymmetry " + sci(a.max_asymmetry) + " (tol 1e-8)");
        o.require(a.min_coercivity_margin >= 0.0, name + ": min <C0 xi,xi> - alpha|xi|^2 " + sci(a.min_coercivity_margin));
        o.require(a.min_voigt_margin >= 0.0, name + ": min <M xi,xi> - <C0 xi,xi> " + sci(a.min_voigt_margin));
    }
    return o;
}

// ============================================================================
// C8 manufactured solutions
// ============================================================================

/// psi = s(x) s(y), s(z) = sin^2(pi z); velocity (psi_y, -psi_x) and its Laplacian.
struct StreamMms {
    static double s(double z) { return std::pow(std::sin(kPi * z), 2); }
    static double s1(double z) { return kPi * std::sin(2 * kPi * z); }
    static double s2(double z) { return 2 * kPi * kPi * std::cos(2 * kPi * z); }
    static double s3(double z) { return -4 * kPi * kPi * kPi * std::sin(2 * kPi * z); }
    static Vec2 vel(Vec2 p) { return {s(p.x) * s1(p.y), -s1(p.x) * s(p.y)}; }
    static Vec2 lap(Vec2 p) {
        return {s2(p.x) * s1(p.y) + s(p.x) * s3(p.y), -(s3(p.x) * s(p.y) + s1(p.x) * s2(p.y))};
    }
};

/// Spatial study: u = (1 + t) curl psi is reproduced exactly in time by backward Euler,
/// so the L2(Q) error is purely spatial.
double mms_spatial_error(int n) {
    GridSpec g;
    g.nx = g.ny = n;
    g.dt = 0.05;
    g.T = 0.25;
    SolverOptions so;
    so.tol = 1e-11;
    StokesSolver solver(g, ViscousOperator(g, Tensor4::identity()), MemoryKernel::zero(), so);
    auto exact = [&](double t) {
        return sample_field(g, [&](Vec2 p) { return (1 + t) * StreamMms::vel(p).x; },
                            [&](Vec2 p) { return (1 + t) * StreamMms::vel(p).y; });
    };
    StokesState st(g);
    st.u = exact(0.0);
    solver.projector().project(st.u);
    const MemoryHistory hist = solver.start_history(st.u);
    auto err_sq = [&] {
        VectorField d = st.u;
        d -= exact(st.t);
        return l2_norm_sq(d);
    };
    const int steps = g.steps();
    double sum = 0.5 * err_sq();
    for (int k = 1; k <= steps; ++k) {
        const double t1 = k * g.dt;
        const VectorField F = sample_field(
            g, [&](Vec2 p) { return StreamMms::vel(p).x - (1 + t1) * StreamMms::lap(p).x; },
            [&](Vec2 p) { return StreamMms::vel(p).y - (1 + t1) * StreamMms::lap(p).y; });
        solver.step(st, hist, F);
        sum += (k == steps ? 0.5 : 1.0) * err_sq();
    }
    return std::sqrt(g.dt * sum);
}

/// Temporal study: u = cos(pi t) w with w discretely divergence-free and the forcing built
/// with the discrete operator, so the L2(Q) error is purely temporal.
double mms_temporal_error(double dt) {
    GridSpec g;
    g.nx = g.ny = 32;
    g.dt = dt;
    g.T = 1.0;
    SolverOptions so;
    so.tol = 1e-11;
    const ViscousOperator K(g, Tensor4::identity());
    StokesSolver solver(g, K, MemoryKernel::zero(), so);
    const VectorField w = stream_function_velocity(g, 1.0);
    const VectorField Kw = K.apply(w);
    auto amp = [](double t) { return std::cos(kPi * t); };
    StokesState st(g);
    st.u = w;
    const MemoryHistory hist = solver.start_history(st.u);
    auto err_sq = [&] {
        VectorField d = st.u;
        d.axpy(-amp(st.t), w);
        return l2_norm_sq(d);
    };
    const int steps = g.steps();
    double sum = 0.5 * err_sq();
    for (int k = 1; k <= steps; ++k) {
        const double t1 = k * dt;
        VectorField F = w;
        F *= -kPi * std::sin(kPi * t1);
        F.axpy(amp(t1), Kw);
        solver.step(st, hist, F);
        sum += (k == steps ? 0.5 : 1.0) * err_sq();
    }
    return std::sqrt(dt * sum);
}

Outcome manufactured_convergence() {
    Outcome o;
    std::vector<double> es, et;
    for (int n : {16, 32, 64, 128}) es.push_back(mms_spatial_error(n));
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) et.push_back(mms_temporal_error(dt));
    std::string ss = "spatial errors", ts = "temporal errors";
    for (double e : es) ss += " " + sci(e);
    for (double e : et) ts += " " + sci(e);
    double ps = 1e300, pt = 1e300;
    std::string sp = " orders", tp = " orders";
    for (std::size_t k = 1; k < es.size(); ++k) {
        const double a = observed_order(es[k - 1], es[k]), b = observed_order(et[k - 1], et[k]);
        ps = std::min(ps, a);
        pt = std::min(pt, b);
        sp += " " + sci(a);
        tp += " " + sci(b);
    }
    o.require(ps >= 1.8, ss + sp + " (min >= 1.8)");
    o.require(pt >= 0.9, ts + tp + " (min >= 0.9)");
    return o;
}

// ============================================================================
// C9 scalar Volterra oracle
// ============================================================================

Outcome volterra_oracle() {
    Outcome o;
    GridSpec g;
    g.nx = g.ny = 32;
    g.dt = 0.02;
    g.T = 1.0;
    SolverOptions so;
    so.tol = 1e-13;

    // Lowest discrete Stokes eigenmode by inverse iteration.
    const ViscousOperator K1(g, Tensor4::identity());
    StokesSolver steady(g, K1, MemoryKernel::zero(), so);
    VectorField phi = stream_function_velocity(g, 1.0);
    phi *= 1.0 / std::sqrt(l2_norm_sq(phi));
    for (int it = 0; it < 300; ++it) {
        VectorField next = steady.solve_steady(phi);
        next *= 1.0 / std::sqrt(l2_norm_sq(next));
        VectorField d = next;
        d -= phi;
        phi = std::move(next);
        if (std::sqrt(l2_norm_sq(d)) < 1e-14) break;
    }
    const double mu = inner_product(K1.apply(phi), phi);
    VectorField res = K1.apply(phi);
    steady.projector().project(res);
    res.axpy(-mu, phi);
    const double eig_res = std::sqrt(l2_norm_sq(res)) / mu;

    // Reduced problem c' = -c - int e^{-(t-s)} c ds on the mode.
    const double a0 = 1.0 / mu, kappa = 1.0 / mu;
    StokesSolver solver(g, ViscousOperator(g, Tensor4::identity(a0)),
                        MemoryKernel::separable_uniform(g, [](double t) { return std::exp(-t); }, Tensor4::identity(kappa)),
                        so);
    StokesState st(g);
    st.u = phi;
    MemoryHistory hist = solver.start_history(st.u);
    const VectorField F(g);
    const int steps = g.steps();
    const std::vector<double> ref = volterra_reference(1.0, 1.0, g.dt, steps);
    double max_err = 0.0, max_ref = 1.0;
    for (int k = 1; k <= steps; ++k) {
        solver.advance(st, hist, F);
        const double c = inner_product(st.u, phi);
        max_err = std::max(max_err, std::abs(c - ref[k]));
        max_ref = std::max(max_ref, std::abs(ref[k]));
    }
    const double rel = max_err / max_ref;
    o.require(eig_res <= 1e-9, "eigenmode residual " + sci(eig_res));
    o.require(rel <= 2.0 * g.dt, "max relative deviation " + sci(rel) + " (tol 2 dt = " + sci(2.0 * g.dt) + ")");
    return o;
}

// ============================================================================
// C10 homogenization convergence
// ============================================================================

Outcome homogenization_convergence(int workers) {
    Outcome o;
    RunConfig cfg = base_config("coupled-cloud", 128, 0.01, 0.5, 0.25);
    cfg.eps_list = {1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0};
    cfg.grid.eps = cfg.eps_list.front();
    cfg.A0 = "sinusoidal-A0";
    cfg.A1 = "exp-memory-kernel";
    cfg.lattice = {32, 32, 16, 16};
    cfg.n_cell = 64;
    cfg.moment_grid = 16;
    const ConvergenceTable t = run_convergence_study(cfg, workers);
    o.require(t.error.empty(), t.error.empty() ? "all runs completed" : "sub-run failed: " + t.error);
    for (const auto& r : t.rows)
        if (!r.done) return o;
    std::string plain = "plain", rec = "reconstructed", gap = "moment gap";
    for (const auto& r : t.rows) {
        plain += " " + sci(r.err_plain);
        rec += " " + sci(r.err_reconstructed);
        gap += " " + sci(r.moment_gap);
    }
    bool dec = true, gap_dec = true;
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
        const double ratio = t.rows[k].err_plain / t.rows[k - 1].err_plain;
        worst_ratio = std::max(worst_ratio, ratio);
        dec = dec && t.rows[k].err_plain < t.rows[k - 1].err_plain;
        gap_dec = gap_dec && t.rows[k].moment_gap < t.rows[k - 1].moment_gap;
    }
    const ConvergenceRow& last = t.rows.back();
    o.require(dec && worst_ratio <= 0.8, plain + " (max ratio " + sci(worst_ratio) + " <= 0.8)");
    o.require(last.err_reconstructed < last.err_plain, rec + " (< plain at the finest eps)");
    o.require(gap_dec, gap + " (decreasing)");
    return o;
}

// ============================================================================
// C11 weak-form residual
// ============================================================================

TestFunction weak_test_function(double T) {
    TestFunction phi;
    auto space = [](Vec2 x) { return std::cos(kPi * x.x) * std::cos(kPi * x.y); };
    auto bump = [](Vec2 v) { return std::exp(-dot(v, v)); };
    phi.value = [=](double t, Vec2 x, Vec2 v) { return (T - t) * space(x) * bump(v); };
    phi.dt = [=](double, Vec2 x, Vec2 v) { return -space(x) * bump(v); };
    phi.grad_x = [=](double t, Vec2 x, Vec2 v) {
        const double s = (T - t) * bump(v) * kPi;
        return Vec2{-s * std::sin(kPi * x.x) * std::cos(kPi * x.y), -s * std::cos(kPi * x.x) * std::sin(kPi * x.y)};
    };
    phi.grad_v = [=](double t, Vec2 x, Vec2 v) { return (-2.0 * (T - t) * space(x) * bump(v)) * v; };
    return phi;
}

Outcome weak_form_residual_decay() {
    Outcome o;
    const double T = 0.4;
    const TestFunction phi = weak_test_function(T);
    check_admissible(phi, T, 1.0, 1.0);
    std::vector<double> res;
    for (int level = 0; level < 3; ++level) {
        const int n = 16 << level;
        RunConfig cfg = base_config("coupled-cloud", n, 0.04 / (1 << level), T, 0.5);
        cfg.lattice = {8 << level, 8 << level, 8 << level, 8 << level};
        CoupledSystem sys = build_system(cfg, 1e-10);
        WeakFormAccumulator acc(phi, cfg.eps_list.front());
        sys.attach_weak_form(&acc);
        sys.run(sys.grid().steps());
        res.push_back(acc.residual());
    }
    std::string s = "residuals";
    for (double r : res) s += " " + sci(r);
    o.require(res[1] < res[0] && res[2] < res[1], s + " (strictly decreasing)");
    return o;
}

struct CriterionDef {
    const char* title;
    double budget;
};

const CriterionDef kCriteria[11] = {
    {"phase-volume law", 1.0},
    {"mass conservation and positivity", 300.0},
    {"specular reflection", 1.0},
    {"discrete energy inequality", 300.0},
    {"fixed-point harness", 120.0},
    {"cell problem trivial case", 10.0},
    {"effective tensor audit", 60.0},
    {"manufactured-solution Stokes convergence", 300.0},
    {"scalar Volterra oracle", 60.0},
    {"homogenization convergence", 900.0},
    {"weak-form residual", 600.0},
};

}  // namespace

std::vector<int> criterion_ids() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
}

std::string criterion_title(int id) {
    if (id < 1 || id > 11) throw ConfigError("unknown criterion " + std::to_string(id));
    return kCriteria[id - 1].title;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
    CriterionResult r;
    r.id = id;
    r.title = criterion_title(id);
    r.budget = kCriteria[id - 1].budget;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        switch (id) {
            case 1: o = phase_volume_law(); break;
            case 2: o = mass_and_positivity(); break;
            case 3: o = specular_reflection(); break;
            case 4: o = energy_inequality(); break;
            case 5: o = fixed_point_harness(); break;
            case 6: o = trivial_cell(); break;
            case 7: o = effective_tensor_audit(opts.workers); break;
            case 8: o = manufactured_convergence(); break;
            case 9: o = volterra_oracle(); break;
            case 10: o = homogenization_convergence(opts.workers); break;
            case 11: o = weak_form_residual_decay(); break;
        }
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(r.seconds < r.budget, "runtime " + sci(r.seconds) + " s (budget " + sci(r.budget) + " s)");
    r.passed = o.passed;
    r.detail = o.detail.str();
    return r;
}

std::string format_result(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "%s C%d %s (%.2f s) ", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
    return head + r.detail;
}

bool run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts,
                    const std::function<void(const CriterionResult&)>& report) {
    bool ok = true;
    for (int id : ids.empty() ? criterion_ids() : ids) {
        const CriterionResult r = run_criterion(id, opts);
        ok = ok && r.passed;
        if (report) report(r);
    }
    return ok;
}

std::vector<double> volterra_reference(double a, double k, double dt_out, int n_out, int substeps) {
    std::vector<double> out(static_cast<std::size_t>(n_out) + 1);
    double c = 1.0, z = 0.0;
    out[0] = c;
    const double h = dt_out / substeps;
    auto fc = [&](double cc, double zz) { return -a * cc - k * zz; };
    auto fz = [](double cc, double zz) { return cc - zz; };
    for (int n = 1; n <= n_out; ++n) {
        for (int s = 0; s < substeps; ++s) {
            const double k1c = fc(c, z), k1z = fz(c, z);
            const double k2c = fc(c + 0.5 * h * k1c, z + 0.5 * h * k1z), k2z = fz(c + 0.5 * h * k1c, z + 0.5 * h * k1z);
            const double k3c = fc(c + 0.5 * h * k2c, z + 0.5 * h * k2z), k3z = fz(c + 0.5 * h * k2c, z + 0.5 * h * k2z);
            const double k4c = fc(c + h * k3c, z + h * k3z), k4z = fz(c + h * k3c, z + h * k3z);
            c += h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
            z += h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
        }
        out[n] = c;
    }
    return out;
}

}  // namespace nlsv
