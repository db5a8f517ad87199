#include "doctest.h"

#include "perstab/config.hpp"
#include "perstab/errors.hpp"
#include "perstab/harness.hpp"
#include "perstab/norms.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace perstab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("perstab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small pinned forced-Burgers scenario, overridable by merging `patch`
std::string small_config(const std::string& patch = "{}") {
    nlohmann::json j = nlohmann::json::parse(R"({
      "name": "small",
      "flux": {"label": "forced_burgers", "params": {"A": 0.5, "T": 1.0}},
      "p": 0.0,
      "grid": {"n_cells_per_period": 16, "n_periods": 64, "boundary_mode": "pinned_to_wp"},
      "family": {"p_min": -1.0, "p_max": 1.0, "M": 16, "stencil": "engquist_osher",
                 "roundtrip_tol": 1e-6},
      "initial": {"shape": "dipole", "amplitude": 0.3, "width": 0.5, "offset": 2.0},
      "run": {"t_end": 2.0, "snapshot_schedule": {"kind": "linear", "t_lo": 0.25, "t_hi": 2.0,
                                                  "count": 8}},
      "checks": ["mass", "l1_contraction", "lap_nonincreasing", "l1_bound", "entropy"]
    })");
    j.merge_patch(nlohmann::json::parse(patch));
    return j.dump();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.in.json";
    std::ofstream(p) << text;
    return p;
}

nlohmann::json read_verdict(const fs::path& dir) {
    return nlohmann::json::parse(slurp(dir / "verdict.json"));
}

} // namespace

TEST_CASE("config: valid file parses and echoes stably") {
    const ScenarioConfig c = parse_config(small_config());
    CHECK(c.grid.n_periods == 64);
    CHECK(c.family.stencil == CellStencil::engquist_osher);
    CHECK(c.initial.shape == Shape::dipole);
    const std::string once = dump_config(c);
    CHECK(dump_config(parse_config(once)) == once);
}

TEST_CASE("config: validation rejects bad scenarios") {
    auto rejects = [](const std::string& patch) {
        CAPTURE(patch);
        CHECK_THROWS_AS(parse_config(small_config(patch)), ConfigError);
    };
    rejects(R"({"family": {"M": 2}})");
    rejects(R"({"grid": {"n_periods": 64.5}})");
    rejects(R"({"grid": {"n_periods": 31}})");
    rejects(R"({"grid": {"boundary_mode": "reflecting"}})");
    rejects(R"({"flux": {"label": "mystery"}})");
    rejects(R"({"bogus_key": 1})");
    rejects(R"({"p": 0.03})"); // not a knot
    rejects(R"({"checks": ["nonsense"]})");
    rejects(R"({"initial": {"shape": "gaussian_bump"}, "checks": ["l1_decay"]})");
    rejects(R"({"initial": {"shape": "gaussian_bump"}, "checks": ["linf_V_decay"]})");
    rejects(R"({"run": {"cfl_fraction": 1.5}})");
    rejects(R"({"run": {"t_end": 1.0}})"); // schedule reaches past t_end
    // fit windows must lie inside the snapshots and hold at least 8 of them
    rejects(R"({"checks": ["dispersion"], "targets": {"dispersion_window": [0.1, 2.0]}})");
    rejects(R"({"checks": ["dispersion"], "targets": {"dispersion_window": [0.5, 3.0]}})");
    rejects(R"({"checks": ["dispersion"], "targets": {"dispersion_window": [1.0, 2.0]}})");
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_NOTHROW(parse_config(small_config(
        R"({"checks": ["dispersion"], "targets": {"dispersion_window": [0.25, 2.0]}})")));
    // a bump is fine for checks that do not need zero mass
    CHECK_NOTHROW(parse_config(small_config(R"({"initial": {"shape": "gaussian_bump"}})")));
}

TEST_CASE("snapshot schedules") {
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::log;
    s.t_lo = 10.0;
    s.t_hi = 100.0;
    s.count = 16;
    const std::vector<double> t = s.times();
    REQUIRE(t.size() == 17);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 10.0);
    CHECK(t.back() == 100.0);
    for (std::size_t k = 2; k < t.size(); ++k) {
        CHECK(t[k] / t[k - 1] == doctest::Approx(std::pow(10.0, 1.0 / 15.0)).epsilon(1e-12));
    }
    s.kind = ScheduleSpec::Kind::linear;
    s.include_start = false;
    s.t_lo = 1.0;
    s.t_hi = 2.0;
    s.count = 5;
    CHECK(s.times() == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
}

TEST_CASE("perturbations: shapes, zero mean, seeding") {
    const LineGrid g = LineGrid::centered(CellGrid(32, 1.0), 32, BoundaryMode::pinned_to_wp);
    const double h = g.spacing();
    InitialSpec bump;
    bump.shape = Shape::gaussian_bump;
    bump.amplitude = 0.4;
    bump.width = 0.5;
    double m = 0.0;
    for (double v : build_perturbation(bump, g)) m += v * h;
    CHECK(m == doctest::Approx(0.4 * 0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-10));

    InitialSpec dip = bump;
    dip.shape = Shape::dipole;
    const std::vector<double> b = build_perturbation(dip, g);
    double mass = 0.0;
    for (double v : b) mass += v;
    CHECK(std::abs(mass * h) <= 1e-15 * norm(b, h, NormKind::L1));
    CHECK(b[g.size() / 2 - 64] > 0.0); // positive lobe on the left, near x = -2

    InitialSpec r;
    r.shape = Shape::random_zero_mean;
    r.amplitude = 0.2;
    r.lobes = 6;
    r.spread = 4.0;
    for (std::uint64_t seed : {1u, 7u, 99u}) {
        r.seed = seed;
        const std::vector<double> a = build_perturbation(r, g);
        CHECK(a == build_perturbation(r, g));
        double s = 0.0;
        for (double v : a) s += v;
        CHECK(std::abs(s * h) <= 1e-15 * norm(a, h, NormKind::L1));
        CHECK(edge_fraction(State::perturbed(g, Profile::constant(g.cell(), 0.0), a)) < 1e-6);
    }
    r.seed = 1;
    const std::vector<double> a1 = build_perturbation(r, g);
    r.seed = 2;
    CHECK(a1 != build_perturbation(r, g));
}

TEST_CASE("family file round trip is exact") {
    const fs::path dir = scratch("family");
    const StationaryFamily f =
        build_family(builtin_flux("forced_burgers", {{"A", 0.3}}), -0.5, 0.5, 16, CellGrid(16, 1.0));
    save_family(f, dir / "family.json");
    const StationaryFamily g = load_family(dir / "family.json");
    CHECK(g.flux.label() == "forced_burgers");
    CHECK(g.flux.params() == f.flux.params());
    CHECK(g.grid == f.grid);
    CHECK(g.stencil == f.stencil);
    CHECK(g.p_grid == f.p_grid);
    CHECK(g.alpha == f.alpha);
    CHECK(g.residuals == f.residuals);
    for (std::size_t k = 0; k < f.size(); ++k) {
        CHECK(std::equal(f.profiles[k].values().begin(), f.profiles[k].values().end(),
                         g.profiles[k].values().begin()));
        CHECK(std::equal(f.dp_profiles[k].values().begin(), f.dp_profiles[k].values().end(),
                         g.dp_profiles[k].values().begin()));
    }
    std::ofstream(dir / "bad.json") << R"({"format": "something-else", "version": 1})";
    CHECK_THROWS_AS(load_family(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS(load_family(dir / "missing.json"), ConfigError);
    const StationaryFamily rev{reversed_flux(f.flux), f.grid, f.stencil, f.p_grid,
                               f.profiles, f.dp_profiles, f.residuals, f.alpha};
    CHECK_THROWS_AS(save_family(rev, dir / "rev.json"), InvalidInput);
}

TEST_CASE("edge buffer guard") {
    const LineGrid g = LineGrid::centered(CellGrid(16, 1.0), 20, BoundaryMode::pinned_to_wp);
    std::vector<double> b(g.size(), 0.0);
    b[g.size() / 2] = 1.0;
    const Profile bg = Profile::constant(g.cell(), 0.0);
    CHECK(edge_fraction(State::perturbed(g, bg, b)) == 0.0);
    CHECK_NOTHROW(check_edge_buffer(State::perturbed(g, bg, b)));
    b[3] = 1e-3;
    CHECK(edge_fraction(State::perturbed(g, bg, b)) == doctest::Approx(1e-3 / 1.001));
    CHECK_THROWS_AS(check_edge_buffer(State::perturbed(g, bg, b)), EdgeBufferViolation);
}

TEST_CASE("commands: exit codes and the verdict file") {
    const fs::path dir = scratch("exit_codes");

    SUBCASE("stationary passes and writes the family") {
        const int code = run_command("stationary", write_config(dir, small_config()), {dir / "o"});
        CHECK(code == kExitPass);
        const auto v = read_verdict(dir / "o");
        CHECK(v["exit_code"] == 0);
        CHECK(!v["verdicts"].empty());
        CHECK(fs::exists(dir / "o" / "family.json"));
        CHECK(fs::exists(dir / "o" / "config.json"));
        // the written family is accepted as input
        const std::string patch =
            R"({"family": {"file": ")" + (dir / "o" / "family.json").string() + R"("}})";
        CHECK(run_command("evolve", write_config(dir, small_config(patch)), {dir / "o2"}) ==
              kExitPass);
    }
    SUBCASE("config errors exit 2 with a verdict") {
        const int code = run_command("stationary",
                                     write_config(dir, small_config(R"({"family": {"M": 2}})")),
                                     {dir / "o"});
        CHECK(code == kExitConfigError);
        const auto v = read_verdict(dir / "o");
        CHECK(v["exit_code"] == 2);
        CHECK(v["verdicts"][0]["passed"] == false);
        CHECK(std::string(v["error"]).find("family.M") != std::string::npos);
        CHECK(run_command("bogus", write_config(dir, small_config()), {dir / "o"}) ==
              kExitConfigError);
    }
    SUBCASE("edge buffer violation exits 4") {
        const int code = run_command(
            "evolve",
            write_config(dir, small_config(R"({"initial": {"shape": "gaussian_bump",
                                              "center": 30.0, "amplitude": 0.1}})")),
            {dir / "o"});
        CHECK(code == kExitEdgeBuffer);
        CHECK(read_verdict(dir / "o")["exit_code"] == 4);
    }
    SUBCASE("solver failure exits 3") {
        // the family cannot reach this round-trip tolerance without doublings
        const int code = run_command(
            "stationary",
            write_config(dir, small_config(
                                  R"({"family": {"roundtrip_tol": 1e-14, "max_doublings": 0}})")),
            {dir / "o"});
        CHECK(code == kExitSolverError);
        CHECK(read_verdict(dir / "o")["exit_code"] == 3);
    }
    SUBCASE("a failing check exits 1") {
        // decay targets cannot be met by t = 2
        const int code = run_command("lap", write_config(dir, small_config()), {dir / "o"});
        CHECK(code == kExitCheckFailed);
        const auto v = read_verdict(dir / "o");
        bool some_failed = false, some_passed = false;
        for (const auto& c : v["verdicts"]) {
            (c["passed"] ? some_passed : some_failed) = true;
        }
        CHECK(some_failed);
        CHECK(some_passed);
    }
}

TEST_CASE("evolve output is byte-identical across reruns") {
    const fs::path dir = scratch("determinism");
    const std::string cfg = small_config(
        R"({"initial": {"shape": "random_zero_mean", "seed": 7, "spread": 3.0, "amplitude": 0.2}})");
    const fs::path in = write_config(dir, cfg);
    REQUIRE(run_command("evolve", in, {dir / "a"}) == kExitPass);
    REQUIRE(run_command("evolve", in, {dir / "b"}) == kExitPass);
    for (const char* f : {"diagnostics.csv", "entropy.csv", "verdict.json",
                          "snapshots/snapshot_000.csv", "snapshots/snapshot_008.csv"}) {
        CAPTURE(f);
        const std::string a = slurp(dir / "a" / f);
        CHECK(!a.empty());
        CHECK(a == slurp(dir / "b" / f));
    }
    // a different seed changes the data
    CommandOverrides o{dir / "c", 8, std::nullopt};
    REQUIRE(run_command("evolve", in, o) == kExitPass);
    CHECK(slurp(dir / "a" / "diagnostics.csv") != slurp(dir / "c" / "diagnostics.csv"));
}

TEST_CASE("verify command on a periodic line") {
    const fs::path dir = scratch("verify");
    const std::string cfg = small_config(R"({"grid": {"boundary_mode": "periodic"},
        "verify": {"trials": 3, "seed": 5, "t_end": 0.5}})");
    REQUIRE(run_command("verify", write_config(dir, cfg), {dir / "o"}) == kExitPass);
    const auto v = read_verdict(dir / "o");
    std::vector<std::string> names;
    for (const auto& c : v["verdicts"]) names.push_back(c["name"]);
    CHECK(names == std::vector<std::string>{"comparison", "contraction", "conservation"});
    CHECK(v["metrics"]["trials"] == 3);
}
