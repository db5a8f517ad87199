#include "perstab/harness.hpp"

#include "perstab/errors.hpp"
#include "perstab/norms.hpp"
#include "perstab/stationary.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

namespace perstab {

using nlohmann::json;
namespace fs = std::filesystem;

bool Verdict::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string verdict_json(const Verdict& v) {
    json j;
    j["command"] = v.command;
    j["scenario"] = v.scenario;
    json checks = json::array();
    for (const CheckResult& c : v.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"detail", c.detail}});
    }
    j["verdicts"] = std::move(checks);
    j["metrics"] = v.metrics;
    j["notes"] = v.notes;
    j["artifacts"] = v.artifacts;
    j["exit_code"] = v.exit_code;
    if (!v.error.empty()) j["error"] = v.error;
    return j.dump(2) + "\n";
}

void write_verdict(const Verdict& v, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "verdict.json");
    if (!out) throw InvalidInput("cannot write " + (out_dir / "verdict.json").string());
    out << verdict_json(v);
}

double edge_fraction(const State& state) {
    const std::vector<double> d = state.perturbation();
    const std::size_t n = d.size();
    const std::size_t band = n / 10;
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += std::abs(d[i]);
        if (i < band || i >= n - band) edge += std::abs(d[i]);
    }
    return total > 0.0 ? edge / total : 0.0;
}

void check_edge_buffer(const State& state, double tol) {
    const double f = edge_fraction(state);
    if (f > tol) {
        throw EdgeBufferViolation("perturbation mass in the edge buffer is " + format_real(f) +
                                  " of the total (limit " + format_real(tol) + ") at t = " +
                                  format_real(state.time()));
    }
}

namespace {

std::size_t knot_index(const StationaryFamily& f, double p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < f.size(); ++k) {
        if (std::abs(f.p_grid[k] - p) < std::abs(f.p_grid[best] - p)) best = k;
    }
    const double step = (f.p_grid.back() - f.p_grid.front()) / static_cast<double>(f.size() - 1);
    if (std::abs(f.p_grid[best] - p) > 1e-9 * step) {
        throw ConfigError("p = " + format_real(p) + " is not a knot of the family");
    }
    return best;
}

void write_snapshot(const State& s, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw InvalidInput("cannot write " + file.string());
    out << "x,u,background\n";
    const LineGrid& g = s.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << format_real(g.center(i)) << ',' << format_real(s.u()[i]) << ','
            << format_real(s.background_at(i)) << '\n';
    }
}

std::string snapshot_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", k);
    return buf;
}

void write_series(const DiagnosticsSeries& s, const fs::path& dir, Verdict& v) {
    {
        std::ofstream out(dir / "diagnostics.csv");
        s.write_csv(out);
    }
    v.artifacts.push_back("diagnostics.csv");
    if (!s.total_eta.empty() && !std::isnan(s.total_eta.front())) {
        std::ofstream out(dir / "entropy.csv");
        s.write_entropy_csv(out);
        v.artifacts.push_back("entropy.csv");
    }
}

double max_increase(const std::vector<double>& a) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < a.size(); ++k) worst = std::max(worst, a[k] - a[k - 1]);
    return a.size() < 2 ? 0.0 : worst;
}

} // namespace

StationaryFamily resolve_family(const ScenarioConfig& cfg) {
    const FluxModel flux = builtin_flux(cfg.flux.label, cfg.flux.params);
    if (cfg.family.file) {
        StationaryFamily f = load_family(*cfg.family.file);
        if (f.flux.label() != flux.label() || f.flux.params() != flux.params()) {
            throw ConfigError("family file flux does not match the config flux");
        }
        if (f.grid.size() != cfg.grid.n_cells_per_period) {
            throw ConfigError("family file n_cells does not match grid.n_cells_per_period");
        }
        return f;
    }
    const CellGrid cell(cfg.grid.n_cells_per_period, flux.period());
    return build_resolved_family(flux, cfg.family.p_min, cfg.family.p_max, cfg.family.M, cell,
                                 cfg.family.roundtrip_tol, cfg.family.max_doublings, cfg.newton,
                                 cfg.family.stencil);
}

ScenarioRun run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
    ScenarioRun run;
    run.config = cfg;
    const FluxModel flux = builtin_flux(cfg.flux.label, cfg.flux.params);
    run.family = std::make_shared<StationaryFamily>(
        opts.family ? load_family(*opts.family) : resolve_family(cfg));
    run.interp = std::make_shared<FamilyInterpolant>(*run.family);
    const StationaryFamily& fam = *run.family;
    const double p_ref = fam.p_grid[knot_index(fam, cfg.p)];

    // the evolution leaves only the Engquist-Osher profile exactly invariant
    run.background = fam.stencil == CellStencil::engquist_osher
                         ? fam.profiles[knot_index(fam, cfg.p)]
                         : discrete_background(flux, p_ref, fam.grid, cfg.newton);
    run.grid = LineGrid::centered(fam.grid, cfg.grid.n_periods, cfg.grid.boundary_mode);
    const std::vector<double> b = build_perturbation(cfg.initial, *run.grid);
    run.initial = State::perturbed(*run.grid, *run.background, b);
    if (cfg.grid.boundary_mode == BoundaryMode::pinned_to_wp) check_edge_buffer(*run.initial);

    const Profile theta = solve_theta(normalize_about_wp(flux, *run.background), fam.grid);

    DiagnosticsContext ctx;
    ctx.initial_mass = run.initial->perturbation_mass();
    ctx.lap.hysteresis = cfg.lap_hysteresis;
    ctx.theta = theta.tile(*run.grid);
    ctx.p_ref = p_ref;

    const FamilyInterpolant* interp = run.interp.get();
    EntropyExtremes& ex = run.entropy;
    ex.alpha_eff = std::min(fam.alpha, interp->min_slope());
    ex.c_eff = std::max(fam.dp_max(), interp->max_slope());
    ex.min_eta = std::numeric_limits<double>::infinity();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    ex.worst_negative = ex.worst_lower = ex.worst_upper = ex.worst_pi_bound = neg_inf;
    const double b_l1 = norm(b, run.grid->spacing(), NormKind::L1);

    std::vector<Observer> observers{diagnostics_observer(ctx)};
    if (opts.entropy) {
        observers.push_back([interp, p_ref, b_l1, &ex](const State& s, DiagnosticsRow& row) {
            const EntropyField e = eta_field(*interp, s, p_ref);
            fill_entropy_columns(e, s, p_ref, row);
            for (std::size_t i = 0; i < e.eta.size(); ++i) {
                const double dp = std::abs(e.pi[i] - p_ref);
                const double q = 0.5 * dp * dp;
                // the integrand u - W(p) is only known to a few ulps of u
                const double floor =
                    16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(s.u()[i])) * dp;
                const double slack = 1e-8 * std::abs(e.eta[i]) + floor;
                ex.min_eta = std::min(ex.min_eta, e.eta[i]);
                ex.worst_negative = std::max(ex.worst_negative, -e.eta[i] - floor);
                ex.worst_lower = std::max(ex.worst_lower, ex.alpha_eff * q - e.eta[i] - slack);
                ex.worst_upper = std::max(ex.worst_upper, e.eta[i] - ex.c_eff * q - slack);
            }
            ex.worst_pi_bound = std::max(ex.worst_pi_bound, e.l1_pi - b_l1 / ex.alpha_eff);
        });
    }
    double& max_edge = run.max_edge_fraction;
    observers.push_back([&max_edge](const State& s, DiagnosticsRow&) {
        max_edge = std::max(max_edge, edge_fraction(s));
    });
    if (opts.snapshot_dir) {
        fs::create_directories(*opts.snapshot_dir);
        auto counter = std::make_shared<std::size_t>(0);
        const fs::path dir = *opts.snapshot_dir;
        observers.push_back([counter, dir](const State& s, DiagnosticsRow&) {
            write_snapshot(s, dir / snapshot_name((*counter)++));
        });
    }

    StepPolicy policy;
    policy.cfl_fraction = cfg.run.cfl_fraction;
    policy.dt_max = cfg.run.dt_max;
    const std::vector<double> times = cfg.run.schedule.times();
    run.result = evolve(*run.initial, flux, cfg.run.t_end, policy, times, observers);
    return run;
}

void evaluate_run_checks(const ScenarioRun& run, Verdict& v) {
    const ScenarioConfig& cfg = run.config;
    const DiagnosticsSeries& s = run.result->series;
    const std::size_t n = s.size();
    if (n == 0) throw InvalidInput("evaluate_run_checks: run recorded no snapshots");
    const double l1_0 = s.l1_dist.front();
    v.metrics["steps"] = static_cast<double>(run.result->steps);
    v.metrics["snapshots"] = static_cast<double>(n);
    v.metrics["l1_dist_initial"] = l1_0;
    v.metrics["l1_dist_final"] = s.l1_dist.back();
    v.metrics["linf_V_initial"] = s.linf_V.front();
    v.metrics["linf_V_final"] = s.linf_V.back();
    v.metrics["max_edge_fraction"] = run.max_edge_fraction;
    v.metrics["alpha"] = run.family->alpha;
    v.metrics["family_size"] = static_cast<double>(run.family->size());

    if (cfg.check_enabled("family")) {
        CheckResult c{"family", true, run.family->alpha, 0.0, "alpha > 0 and family invariants"};
        try {
            check_family(*run.family);
            c.passed = run.family->alpha > 0.0;
        } catch (const SolverError& e) {
            c.passed = false;
            c.detail = e.what();
        }
        v.add(c);
    }
    if (cfg.check_enabled("mass")) {
        double worst = 0.0;
        for (double m : s.mass_offset) worst = std::max(worst, std::abs(m));
        const double rel = l1_0 > 0.0 ? worst / l1_0 : worst;
        v.add({"mass", rel <= 1e-10, rel, 1e-10, "max |mass offset| / |u(0) - w_p|_1"});
    }
    if (cfg.check_enabled("l1_contraction")) {
        const double inc = max_increase(s.l1_dist);
        v.add({"l1_contraction", inc <= 1e-10 * l1_0, inc, 1e-10 * l1_0,
               "largest increase of |u - w_p|_1 between snapshots"});
    }
    if (cfg.check_enabled("l1_decay")) {
        const double r = s.l1_dist.back() / l1_0;
        v.add({"l1_decay", r <= cfg.targets.l1_ratio, r, cfg.targets.l1_ratio,
               "|u(t_end) - w_p|_1 / |u(0) - w_p|_1"});
    }
    if (cfg.check_enabled("linf_V_decay")) {
        const double r = s.linf_V.back() / s.linf_V.front();
        v.add({"linf_V_decay", r <= cfg.targets.linf_V_ratio, r, cfg.targets.linf_V_ratio,
               "|V(t_end)|_inf / |V(0)|_inf"});
    }
    if (cfg.check_enabled("lap_nonincreasing")) {
        int worst = std::numeric_limits<int>::min();
        int max_lap = s.lap_number.front();
        for (std::size_t k = 1; k < n; ++k) {
            worst = std::max(worst, s.lap_number[k] - s.lap_number[k - 1]);
            max_lap = std::max(max_lap, s.lap_number[k]);
        }
        if (n < 2) worst = 0;
        CheckResult c{"lap_nonincreasing", worst <= 0, static_cast<double>(worst), 0.0,
                      "largest increase of lap_number(V) between snapshots"};
        if (worst > 0) {
            // fallback bound: never above the initial lap number
            c.passed = max_lap <= s.lap_number.front();
            c.detail += "; strict non-increase failed, fallback lap <= lap(0) " +
                        std::string(c.passed ? "holds" : "fails");
            v.notes.push_back("lap number increased between snapshots (incident logged)");
        }
        v.add(c);
    }
    if (cfg.check_enabled("sign_vs_lap")) {
        int worst = std::numeric_limits<int>::min();
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, s.sign_changes[k] - (s.lap_number[k] + 1));
        }
        v.add({"sign_vs_lap", worst <= 0, static_cast<double>(worst), 0.0,
               "max of sign_changes - (lap + 1)"});
    }
    if (cfg.check_enabled("l1_bound")) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double rhs = 2.0 * (s.lap_number[k] + 1) * s.linf_V[k];
            worst = std::max(worst, s.l1_dist[k] - rhs);
        }
        v.add({"l1_bound", worst <= 1e-9, worst, 1e-9, "max of |u - w_p|_1 - 2 (m + 1) |V|_inf"});
    }
    if (cfg.check_enabled("weighted_energy")) {
        const double inc = max_increase(s.weighted_energy);
        v.add({"weighted_energy", inc <= 1e-9, inc, 1e-9,
               "largest increase of the theta-weighted energy of V"});
    }
    if (cfg.check_enabled("entropy")) {
        if (s.total_eta.empty() || std::isnan(s.total_eta.front())) {
            throw InvalidInput("entropy check needs a run with entropy columns");
        }
        const EntropyExtremes& ex = run.entropy;
        v.metrics["alpha_eff"] = ex.alpha_eff;
        v.metrics["dp_max_eff"] = ex.c_eff;
        v.metrics["min_eta"] = ex.min_eta;
        v.add({"eta_nonnegative", ex.worst_negative <= 0.0, ex.worst_negative, 0.0,
               "max of -eta_i beyond the roundoff floor"});
        v.add({"eta_sandwich_lower", ex.worst_lower <= 0.0, ex.worst_lower, 0.0,
               "max of alpha pi^2/2 - eta_i beyond slack"});
        v.add({"eta_sandwich_upper", ex.worst_upper <= 0.0, ex.worst_upper, 0.0,
               "max of eta_i - C pi^2/2 beyond slack"});
        v.add({"pi_l1_bound", ex.worst_pi_bound <= 1e-12 * l1_0 / ex.alpha_eff, ex.worst_pi_bound,
               1e-12 * l1_0 / ex.alpha_eff, "max of |pi|_1 - |b|_1 / alpha"});
        const double inc = max_increase(s.total_eta);
        v.add({"total_eta_nonincreasing", inc <= 1e-10, inc, 1e-10,
               "largest increase of total eta between snapshots"});
    }
    if (cfg.check_enabled("dispersion")) {
        try {
            const DispersionFit fit = dispersion_fit(s, cfg.targets.dispersion_window);
            v.metrics["dispersion_exponent"] = fit.exponent;
            v.metrics["dispersion_constant"] = fit.constant;
            v.metrics["dispersion_r_squared"] = fit.r_squared;
            v.metrics["dispersion_points"] = static_cast<double>(fit.points);
            v.add({"dispersion_exponent", fit.exponent <= cfg.targets.dispersion_exponent,
                   fit.exponent, cfg.targets.dispersion_exponent,
                   "slope of log |u - w_p|_2 against log t"});
            v.add({"dispersion_r_squared", fit.r_squared >= cfg.targets.dispersion_r_squared,
                   fit.r_squared, cfg.targets.dispersion_r_squared, "fit quality"});
        } catch (const AlreadyConverged& e) {
            v.add({"dispersion_exponent", true, 0.0, cfg.targets.dispersion_exponent,
                   std::string("already converged: ") + e.what()});
        }
    }
}

Verdict cmd_stationary(const ScenarioConfig& cfg, const fs::path& out) {
    Verdict v;
    v.command = "stationary";
    v.scenario = cfg.name;
    fs::create_directories(out);
    const StationaryFamily fam = resolve_family(cfg);
    save_family(fam, out / "family.json");
    v.artifacts.push_back("family.json");

    double max_res = 0.0;
    for (double r : fam.residuals) max_res = std::max(max_res, r);
    double floor = 0.0;
    for (const Profile& w : fam.profiles) {
        floor = std::max(floor, residual_roundoff_floor(fam.flux, w.values(), fam.grid));
    }
    const double res_tol = std::max(cfg.newton.tolerance, floor);
    v.metrics["alpha"] = fam.alpha;
    v.metrics["dp_max"] = fam.dp_max();
    v.metrics["M"] = static_cast<double>(fam.size() - 1);
    v.metrics["max_residual"] = max_res;

    v.add({"residuals", max_res <= res_tol, max_res, res_tol, "max final Newton residual"});
    v.add({"alpha_positive", fam.alpha > 0.0, fam.alpha, 0.0, "min over p of d_p w"});

    // pointwise monotone in p, checked directly on the stored profiles
    double worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < fam.size(); ++k) {
        for (std::size_t i = 0; i < fam.grid.size(); ++i) {
            worst_gap = std::min(worst_gap, fam.profiles[k][i] - fam.profiles[k - 1][i]);
        }
    }
    v.add({"monotone_in_p", worst_gap > 0.0, worst_gap, 0.0,
           "min over cells and knots of w_{p_j+1} - w_{p_j}"});

    CheckResult inv{"family_invariants", true, 0.0, 0.0, "means, dp means, alpha"};
    try {
        check_family(fam);
    } catch (const SolverError& e) {
        inv.passed = false;
        inv.detail = e.what();
    }
    v.add(inv);

    const double rt = family_roundtrip_error(fam, cfg.newton);
    v.metrics["roundtrip_error"] = rt;
    v.add({"roundtrip", rt <= cfg.family.roundtrip_tol, rt, cfg.family.roundtrip_tol,
           "inversion error at interval midpoints"});
    return v;
}

Verdict cmd_evolve(const ScenarioConfig& cfg, const fs::path& out) {
    Verdict v;
    v.command = "evolve";
    v.scenario = cfg.name;
    fs::create_directories(out);
    RunOptions opts;
    opts.snapshot_dir = out / "snapshots";
    const ScenarioRun run = run_scenario(cfg, opts);
    write_series(run.result->series, out, v);
    v.artifacts.push_back("snapshots/");
    evaluate_run_checks(run, v);
    return v;
}

Verdict cmd_dispersion(const ScenarioConfig& cfg, const fs::path& out) {
    ScenarioConfig c = cfg;
    if (!c.check_enabled("dispersion")) {
        c.checks.push_back("dispersion");
        c.validate();
    }
    Verdict v;
    v.command = "dispersion";
    v.scenario = cfg.name;
    fs::create_directories(out);
    RunOptions opts;
    opts.entropy = c.check_enabled("entropy");
    const ScenarioRun run = run_scenario(c, opts);
    write_series(run.result->series, out, v);
    evaluate_run_checks(run, v);
    return v;
}

Verdict cmd_lap(const ScenarioConfig& cfg, const fs::path& out) {
    ScenarioConfig c = cfg;
    for (const char* name :
         {"lap_nonincreasing", "l1_bound", "linf_V_decay", "l1_decay", "l1_contraction"}) {
        if (!c.check_enabled(name)) c.checks.push_back(name);
    }
    c.validate();
    Verdict v;
    v.command = "lap";
    v.scenario = cfg.name;
    fs::create_directories(out);
    RunOptions opts;
    opts.entropy = c.check_enabled("entropy");
    const ScenarioRun run = run_scenario(c, opts);
    write_series(run.result->series, out, v);
    evaluate_run_checks(run, v);
    return v;
}

Verdict cmd_verify(const ScenarioConfig& cfg, const fs::path& out) {
    Verdict v;
    v.command = "verify";
    v.scenario = cfg.name;
    fs::create_directories(out);
    const FluxModel flux = builtin_flux(cfg.flux.label, cfg.flux.params);
    const CellGrid cell(cfg.grid.n_cells_per_period, flux.period());
    const Profile bg = discrete_background(flux, cfg.p, cell, cfg.newton);
    const LineGrid grid = LineGrid::centered(cell, cfg.grid.n_periods, cfg.grid.boundary_mode);
    const double h = grid.spacing();
    const bool periodic = cfg.grid.boundary_mode == BoundaryMode::periodic;
    const double reach = 0.25 * grid.length();
    StepPolicy policy;
    policy.cfl_fraction = cfg.run.cfl_fraction;
    policy.dt_max = cfg.run.dt_max;

    std::mt19937_64 rng(cfg.verify.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](bool nonnegative) {
        InitialSpec spec;
        spec.shape = nonnegative ? Shape::gaussian_bump : Shape::random_zero_mean;
        spec.amplitude = cfg.verify.amplitude * (0.25 + 0.75 * unit(rng));
        spec.width = 0.25 + 0.75 * unit(rng);
        spec.center = (2.0 * unit(rng) - 1.0) * 0.5 * reach;
        spec.spread = 0.5 * reach;
        spec.lobes = 2 + static_cast<int>(6.0 * unit(rng));
        spec.seed = rng();
        return build_perturbation(spec, grid);
    };
    auto l1 = [h](const State& a, const State& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.u().size(); ++i) s += std::abs(a.u()[i] - b.u()[i]);
        return s * h;
    };
    auto mass = [h](const State& a, const State& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.u().size(); ++i) s += a.u()[i] - b.u()[i];
        return s * h;
    };

    double worst_order = -std::numeric_limits<double>::infinity();
    double worst_contraction = -std::numeric_limits<double>::infinity();
    double worst_rate = 0.0;
    int failing_trial = -1;
    std::size_t total_steps = 0;
    for (int trial = 0; trial < cfg.verify.trials; ++trial) {
        const std::vector<double> a = draw(false);
        std::vector<double> lift = draw(true);
        const std::vector<double> c = draw(false);
        for (std::size_t i = 0; i < a.size(); ++i) lift[i] += a[i];
        State u = State::perturbed(grid, bg, a);
        State w = State::perturbed(grid, bg, lift); // u <= w
        State z = State::perturbed(grid, bg, c);
        const double uz0 = mass(u, z), uw0 = mass(u, w);
        double d_uz = l1(u, z), d_uw = l1(u, w);
        bool ok = true;
        while (u.time() < cfg.verify.t_end) {
            double dt = std::min({stable_dt(u, flux, policy), stable_dt(w, flux, policy),
                                  stable_dt(z, flux, policy)});
            const double remaining = cfg.verify.t_end - u.time();
            if (remaining <= dt) dt = remaining;
            else if (remaining < 2.0 * dt) dt = 0.5 * remaining;
            const double t_next = remaining <= dt ? cfg.verify.t_end : u.time() + dt;
            u = step(u, flux, dt);
            w = step(w, flux, dt);
            z = step(z, flux, dt);
            u.set_time(t_next);
            w.set_time(t_next);
            z.set_time(t_next);
            ++total_steps;
            for (std::size_t i = 0; i < u.u().size(); ++i) {
                worst_order = std::max(worst_order, u.u()[i] - w.u()[i]);
            }
            const double n_uz = l1(u, z), n_uw = l1(u, w);
            worst_contraction = std::max({worst_contraction, n_uz - d_uz, n_uw - d_uw});
            d_uz = n_uz;
            d_uw = n_uw;
            if (periodic) {
                const double t = u.time();
                worst_rate = std::max({worst_rate, std::abs(mass(u, z) - uz0) / t,
                                       std::abs(mass(u, w) - uw0) / t});
            }
            ok = ok && worst_order <= 1e-12 && worst_contraction <= 1e-10 && worst_rate <= 1e-10;
        }
        if (!ok && failing_trial < 0) failing_trial = trial;
    }
    const std::string where =
        failing_trial < 0 ? std::string()
                          : "; first failing trial " + std::to_string(failing_trial) + " (seed " +
                                std::to_string(cfg.verify.seed) + ")";
    v.metrics["trials"] = cfg.verify.trials;
    v.metrics["steps"] = static_cast<double>(total_steps);
    v.metrics["seed"] = static_cast<double>(cfg.verify.seed);
    v.add({"comparison", worst_order <= 1e-12, worst_order, 1e-12,
           "max over steps and cells of u_i - v_i for u(0) <= v(0)" + where});
    v.add({"contraction", worst_contraction <= 1e-10, worst_contraction, 1e-10,
           "largest per-step increase of |u - v|_1" + where});
    if (periodic) {
        v.add({"conservation", worst_rate <= 1e-10, worst_rate, 1e-10,
               "max of |mass drift| / t" + where});
    } else {
        v.notes.push_back("conservation is checked in periodic mode only");
    }
    return v;
}

int run_command(const std::string& command, const fs::path& config_path,
                const CommandOverrides& overrides) {
    Verdict v;
    v.command = command;
    fs::path out = overrides.out.value_or("out");
    try {
        ScenarioConfig cfg = load_config(config_path);
        v.scenario = cfg.name;
        if (overrides.out) cfg.output = *overrides.out;
        if (overrides.seed) {
            cfg.initial.seed = *overrides.seed;
            cfg.verify.seed = *overrides.seed;
        }
        if (overrides.trials) cfg.verify.trials = *overrides.trials;
        cfg.validate();
        out = cfg.output;
        fs::create_directories(out);
        {
            std::ofstream echo(out / "config.json");
            echo << dump_config(cfg);
        }
        if (command == "stationary") v = cmd_stationary(cfg, out);
        else if (command == "evolve") v = cmd_evolve(cfg, out);
        else if (command == "verify") v = cmd_verify(cfg, out);
        else if (command == "dispersion") v = cmd_dispersion(cfg, out);
        else if (command == "lap") v = cmd_lap(cfg, out);
        else throw ConfigError("unknown command '" + command + "'");
        v.artifacts.insert(v.artifacts.begin(), "config.json");
        if (v.checks.empty()) {
            v.add({"ran", true, 0.0, 0.0, "no checks enabled; the run completed"});
        }
        v.exit_code = v.all_passed() ? kExitPass : kExitCheckFailed;
    } catch (const EdgeBufferViolation& e) {
        v.exit_code = kExitEdgeBuffer;
        v.error = e.what();
    } catch (const InvalidInput& e) {
        v.exit_code = kExitConfigError;
        v.error = e.what();
    } catch (const std::exception& e) {
        v.exit_code = kExitSolverError;
        v.error = e.what();
    }
    if (v.checks.empty()) {
        v.add({"completed", false, 0.0, 0.0, v.error});
    }
    v.command = command;
    write_verdict(v, out);
    return v.exit_code;
}

} // namespace perstab
