#include "perstab/config.hpp"

#include "perstab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace perstab {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

double get_real(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": not finite");
    return d;
}

std::size_t get_count(const json& obj, const char* key, const std::string& where,
                      std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_float()) {
        throw ConfigError(where + "." + key + ": must be a whole number, got " + v.dump());
    }
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return obj.at(key).get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& where, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected true/false");
    return obj.at(key).get<bool>();
}

Shape parse_shape(const std::string& s) {
    if (s == "none") return Shape::none;
    if (s == "gaussian_bump") return Shape::gaussian_bump;
    if (s == "dipole") return Shape::dipole;
    if (s == "random_zero_mean") return Shape::random_zero_mean;
    throw ConfigError("initial.shape: unknown shape '" + s + "'");
}

std::string shape_name(Shape s) {
    switch (s) {
    case Shape::none: return "none";
    case Shape::gaussian_bump: return "gaussian_bump";
    case Shape::dipole: return "dipole";
    case Shape::random_zero_mean: return "random_zero_mean";
    }
    return "none";
}

template <class Fn>
auto rethrow_as_config(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

} // namespace

std::vector<double> ScheduleSpec::times() const {
    std::vector<double> t;
    if (include_start) t.push_back(0.0);
    if (count == 0) return t;
    if (count == 1) {
        t.push_back(t_hi);
        return t;
    }
    for (std::size_t k = 0; k < count; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(count - 1);
        double v = kind == Kind::linear ? t_lo + s * (t_hi - t_lo)
                                        : t_lo * std::pow(t_hi / t_lo, s);
        if (k == 0) v = t_lo;
        if (k + 1 == count) v = t_hi;
        t.push_back(v);
    }
    return t;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {
        "family",            // family invariants and alpha > 0
        "mass",              // perturbation mass conserved
        "l1_contraction",    // |u - w_p|_1 nonincreasing
        "l1_decay",          // |u - w_p|_1 ratio at t_end below targets.l1_ratio
        "linf_V_decay",      // |V|_inf ratio at t_end below targets.linf_V_ratio
        "lap_nonincreasing", // lap number of V never increases
        "sign_vs_lap",       // sign changes of u - w_p <= lap + 1
        "l1_bound",          // |u - w_p|_1 <= 2 (m + 1) |V|_inf
        "weighted_energy",   // theta-weighted energy of V nonincreasing
        "entropy",           // eta >= 0, sandwich, pi bound, total_eta nonincreasing
        "dispersion",        // decay exponent of |u - w_p|_2 on the fit window
        "comparison",        // verify: ordered data stay ordered
        "contraction",       // verify: L1 distance nonincreasing
        "conservation",      // verify: mass of each run conserved (periodic)
    };
    return names;
}

bool ScenarioConfig::check_enabled(const std::string& name) const {
    return std::find(checks.begin(), checks.end(), name) != checks.end();
}

void ScenarioConfig::validate() const {
    rethrow_as_config("flux", [&] {
        builtin_flux(flux.label, flux.params);
        return 0;
    });
    if (grid.n_cells_per_period < CellGrid::kMinCells) {
        throw ConfigError("grid.n_cells_per_period: need at least " +
                          std::to_string(CellGrid::kMinCells));
    }
    if (grid.n_periods < 2 || grid.n_periods % 2 != 0) {
        throw ConfigError("grid.n_periods: must be an even number of whole periods >= 2");
    }
    if (family.M < 16) {
        throw ConfigError("family.M: need at least 16 intervals, got " + std::to_string(family.M));
    }
    if (!(family.p_min < family.p_max)) throw ConfigError("family: p_min must be < p_max");
    if (!(family.roundtrip_tol > 0.0)) throw ConfigError("family.roundtrip_tol: must be > 0");
    if (family.max_doublings < 0) throw ConfigError("family.max_doublings: must be >= 0");
    if (!family.file) {
        const double s = (p - family.p_min) / (family.p_max - family.p_min) *
                         static_cast<double>(family.M);
        if (p < family.p_min || p > family.p_max || std::abs(s - std::round(s)) > 1e-9) {
            throw ConfigError("p: background mean must be a knot of the family p grid");
        }
    }
    rethrow_as_config("newton", [&] {
        newton.validate();
        return 0;
    });

    if (initial.shape != Shape::none) {
        if (!(initial.width > 0.0)) throw ConfigError("initial.width: must be > 0");
        if (initial.shape == Shape::random_zero_mean && initial.lobes < 2) {
            throw ConfigError("initial.lobes: random_zero_mean needs at least 2 lobes");
        }
        if (!(initial.spread >= 0.0)) throw ConfigError("initial.spread: must be >= 0");
    }
    if (initial.shape == Shape::gaussian_bump &&
        (check_enabled("l1_decay") || check_enabled("linf_V_decay"))) {
        throw ConfigError("initial.shape: gaussian_bump has nonzero mass and cannot be used with "
                          "the l1_decay / linf_V_decay checks");
    }

    if (!(run.t_end > 0.0)) throw ConfigError("run.t_end: must be > 0");
    if (!(run.cfl_fraction > 0.0 && run.cfl_fraction <= 1.0)) {
        throw ConfigError("run.cfl_fraction: must lie in (0, 1]");
    }
    if (!(run.dt_max > 0.0)) throw ConfigError("run.dt_max: must be > 0");
    const ScheduleSpec& sc = run.schedule;
    if (sc.count > 0) {
        if (!(sc.t_lo > 0.0) || !(sc.t_lo <= sc.t_hi)) {
            throw ConfigError("run.snapshot_schedule: need 0 < t_lo <= t_hi");
        }
        if (sc.count > 1 && !(sc.t_lo < sc.t_hi)) {
            throw ConfigError("run.snapshot_schedule: need t_lo < t_hi for several snapshots");
        }
        if (sc.t_hi > run.t_end) throw ConfigError("run.snapshot_schedule: t_hi beyond run.t_end");
    }

    for (const std::string& c : checks) {
        const auto& k = known_checks();
        if (std::find(k.begin(), k.end(), c) == k.end()) {
            throw ConfigError("checks: unknown check '" + c + "'");
        }
    }
    if (check_enabled("dispersion")) {
        const auto [lo, hi] = targets.dispersion_window;
        if (!(lo > 0.0 && lo < hi)) throw ConfigError("targets.dispersion_window: need 0 < lo < hi");
        const std::vector<double> t = sc.times();
        if (sc.count == 0 || lo < sc.t_lo || hi > sc.t_hi) {
            throw ConfigError("targets.dispersion_window: window lies outside the snapshot times");
        }
        const auto inside = std::count_if(t.begin(), t.end(),
                                          [&](double v) { return v >= lo && v <= hi; });
        if (inside < 8) {
            throw ConfigError("targets.dispersion_window: fewer than 8 snapshots inside the window");
        }
    }
    if (verify.trials < 1) throw ConfigError("verify.trials: must be >= 1");
    if (!(verify.t_end > 0.0)) throw ConfigError("verify.t_end: must be > 0");
    if (!(verify.amplitude > 0.0)) throw ConfigError("verify.amplitude: must be > 0");
    if (lap_hysteresis && !(*lap_hysteresis >= 0.0)) {
        throw ConfigError("lap_hysteresis: must be >= 0");
    }
}

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(root, "config",
              {"name", "flux", "p", "grid", "family", "initial", "run", "verify", "targets",
               "checks", "lap_hysteresis", "newton", "output"});
    ScenarioConfig c;
    c.name = get_string(root, "name", "config", c.name);
    c.p = get_real(root, "p", "config", c.p);

    if (root.contains("flux")) {
        const json& f = root.at("flux");
        if (f.is_string()) {
            c.flux.label = f.get<std::string>();
        } else {
            only_keys(f, "flux", {"label", "params"});
            c.flux.label = get_string(f, "label", "flux", c.flux.label);
            if (f.contains("params")) {
                const json& p = f.at("params");
                if (!p.is_object()) throw ConfigError("flux.params: expected an object");
                for (const auto& [k, v] : p.items()) {
                    if (!v.is_number()) throw ConfigError("flux.params." + k + ": expected a number");
                    c.flux.params[k] = v.get<double>();
                }
            }
        }
    }
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        only_keys(g, "grid", {"n_cells_per_period", "n_periods", "boundary_mode"});
        c.grid.n_cells_per_period =
            get_count(g, "n_cells_per_period", "grid", c.grid.n_cells_per_period);
        c.grid.n_periods = get_count(g, "n_periods", "grid", c.grid.n_periods);
        if (g.contains("boundary_mode")) {
            c.grid.boundary_mode = rethrow_as_config("grid.boundary_mode", [&] {
                return parse_boundary_mode(get_string(g, "boundary_mode", "grid", ""));
            });
        }
    }
    if (root.contains("family")) {
        const json& f = root.at("family");
        only_keys(f, "family",
                  {"p_min", "p_max", "M", "stencil", "roundtrip_tol", "max_doublings", "file"});
        c.family.p_min = get_real(f, "p_min", "family", c.family.p_min);
        c.family.p_max = get_real(f, "p_max", "family", c.family.p_max);
        c.family.M = get_count(f, "M", "family", c.family.M);
        if (f.contains("stencil")) {
            c.family.stencil = rethrow_as_config("family.stencil", [&] {
                return parse_cell_stencil(get_string(f, "stencil", "family", ""));
            });
        }
        c.family.roundtrip_tol = get_real(f, "roundtrip_tol", "family", c.family.roundtrip_tol);
        c.family.max_doublings = static_cast<int>(
            get_count(f, "max_doublings", "family", static_cast<std::size_t>(c.family.max_doublings)));
        if (f.contains("file")) c.family.file = get_string(f, "file", "family", "");
    }
    if (root.contains("initial")) {
        const json& i = root.at("initial");
        only_keys(i, "initial",
                  {"shape", "amplitude", "width", "center", "offset", "spread", "lobes", "seed"});
        c.initial.shape = parse_shape(get_string(i, "shape", "initial", "none"));
        c.initial.amplitude = get_real(i, "amplitude", "initial", c.initial.amplitude);
        c.initial.width = get_real(i, "width", "initial", c.initial.width);
        c.initial.center = get_real(i, "center", "initial", c.initial.center);
        c.initial.offset = get_real(i, "offset", "initial", c.initial.offset);
        c.initial.spread = get_real(i, "spread", "initial", c.initial.spread);
        c.initial.lobes = static_cast<int>(
            get_count(i, "lobes", "initial", static_cast<std::size_t>(c.initial.lobes)));
        c.initial.seed = get_count(i, "seed", "initial", c.initial.seed);
    }
    if (root.contains("run")) {
        const json& r = root.at("run");
        only_keys(r, "run", {"t_end", "snapshot_schedule", "cfl_fraction", "dt_max"});
        c.run.t_end = get_real(r, "t_end", "run", c.run.t_end);
        c.run.cfl_fraction = get_real(r, "cfl_fraction", "run", c.run.cfl_fraction);
        c.run.dt_max = get_real(r, "dt_max", "run", c.run.dt_max);
        if (r.contains("snapshot_schedule")) {
            const json& s = r.at("snapshot_schedule");
            only_keys(s, "run.snapshot_schedule",
                      {"kind", "t_lo", "t_hi", "count", "include_start"});
            const std::string kind = get_string(s, "kind", "run.snapshot_schedule", "log");
            if (kind == "linear") c.run.schedule.kind = ScheduleSpec::Kind::linear;
            else if (kind == "log") c.run.schedule.kind = ScheduleSpec::Kind::log;
            else throw ConfigError("run.snapshot_schedule.kind: expected 'linear' or 'log'");
            c.run.schedule.t_lo = get_real(s, "t_lo", "run.snapshot_schedule", c.run.schedule.t_lo);
            c.run.schedule.t_hi = get_real(s, "t_hi", "run.snapshot_schedule", c.run.schedule.t_hi);
            c.run.schedule.count = get_count(s, "count", "run.snapshot_schedule", c.run.schedule.count);
            c.run.schedule.include_start =
                get_bool(s, "include_start", "run.snapshot_schedule", c.run.schedule.include_start);
        }
    }
    if (root.contains("verify")) {
        const json& v = root.at("verify");
        only_keys(v, "verify", {"trials", "seed", "t_end", "amplitude"});
        c.verify.trials = static_cast<int>(
            get_count(v, "trials", "verify", static_cast<std::size_t>(c.verify.trials)));
        c.verify.seed = get_count(v, "seed", "verify", c.verify.seed);
        c.verify.t_end = get_real(v, "t_end", "verify", c.verify.t_end);
        c.verify.amplitude = get_real(v, "amplitude", "verify", c.verify.amplitude);
    }
    if (root.contains("targets")) {
        const json& t = root.at("targets");
        only_keys(t, "targets",
                  {"linf_V_ratio", "l1_ratio", "dispersion_exponent", "dispersion_r_squared",
                   "dispersion_window"});
        c.targets.linf_V_ratio = get_real(t, "linf_V_ratio", "targets", c.targets.linf_V_ratio);
        c.targets.l1_ratio = get_real(t, "l1_ratio", "targets", c.targets.l1_ratio);
        c.targets.dispersion_exponent =
            get_real(t, "dispersion_exponent", "targets", c.targets.dispersion_exponent);
        c.targets.dispersion_r_squared =
            get_real(t, "dispersion_r_squared", "targets", c.targets.dispersion_r_squared);
        if (t.contains("dispersion_window")) {
            const json& w = t.at("dispersion_window");
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
                throw ConfigError("targets.dispersion_window: expected [t_lo, t_hi]");
            }
            c.targets.dispersion_window = {w[0].get<double>(), w[1].get<double>()};
        }
    }
    if (root.contains("checks")) {
        const json& ch = root.at("checks");
        if (!ch.is_array()) throw ConfigError("checks: expected an array of names");
        for (const json& v : ch) {
            if (!v.is_string()) throw ConfigError("checks: expected an array of names");
            c.checks.push_back(v.get<std::string>());
        }
    }
    if (root.contains("lap_hysteresis")) {
        c.lap_hysteresis = get_real(root, "lap_hysteresis", "config", 0.0);
    }
    if (root.contains("newton")) {
        const json& n = root.at("newton");
        only_keys(n, "newton", {"tolerance", "max_iterations", "damping", "continuation_step"});
        c.newton.tolerance = get_real(n, "tolerance", "newton", c.newton.tolerance);
        c.newton.max_iterations = static_cast<int>(get_count(
            n, "max_iterations", "newton", static_cast<std::size_t>(c.newton.max_iterations)));
        c.newton.damping = get_real(n, "damping", "newton", c.newton.damping);
        c.newton.continuation_step =
            get_real(n, "continuation_step", "newton", c.newton.continuation_step);
    }
    c.output = get_string(root, "output", "config", c.output.string());
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    ScenarioConfig c = parse_config(ss.str());
    // a relative family file is resolved against the config's directory
    if (c.family.file && c.family.file->is_relative()) {
        c.family.file = path.parent_path() / *c.family.file;
    }
    return c;
}

std::string dump_config(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["flux"] = {{"label", c.flux.label}, {"params", c.flux.params}};
    j["p"] = c.p;
    j["grid"] = {{"n_cells_per_period", c.grid.n_cells_per_period},
                 {"n_periods", c.grid.n_periods},
                 {"boundary_mode", to_string(c.grid.boundary_mode)}};
    j["family"] = {{"p_min", c.family.p_min},
                   {"p_max", c.family.p_max},
                   {"M", c.family.M},
                   {"stencil", to_string(c.family.stencil)},
                   {"roundtrip_tol", c.family.roundtrip_tol},
                   {"max_doublings", c.family.max_doublings}};
    if (c.family.file) j["family"]["file"] = c.family.file->string();
    j["initial"] = {{"shape", shape_name(c.initial.shape)}, {"amplitude", c.initial.amplitude},
                    {"width", c.initial.width},             {"center", c.initial.center},
                    {"offset", c.initial.offset},           {"spread", c.initial.spread},
                    {"lobes", c.initial.lobes},             {"seed", c.initial.seed}};
    const ScheduleSpec& s = c.run.schedule;
    j["run"] = {{"t_end", c.run.t_end},
                {"cfl_fraction", c.run.cfl_fraction},
                {"dt_max", c.run.dt_max},
                {"snapshot_schedule",
                 {{"kind", s.kind == ScheduleSpec::Kind::log ? "log" : "linear"},
                  {"t_lo", s.t_lo},
                  {"t_hi", s.t_hi},
                  {"count", s.count},
                  {"include_start", s.include_start}}}};
    j["verify"] = {{"trials", c.verify.trials}, {"seed", c.verify.seed},
                   {"t_end", c.verify.t_end}, {"amplitude", c.verify.amplitude}};
    j["targets"] = {{"linf_V_ratio", c.targets.linf_V_ratio},
                    {"l1_ratio", c.targets.l1_ratio},
                    {"dispersion_exponent", c.targets.dispersion_exponent},
                    {"dispersion_r_squared", c.targets.dispersion_r_squared},
                    {"dispersion_window",
                     {c.targets.dispersion_window.first, c.targets.dispersion_window.second}}};
    j["checks"] = c.checks;
    if (c.lap_hysteresis) j["lap_hysteresis"] = *c.lap_hysteresis;
    j["newton"] = {{"tolerance", c.newton.tolerance},
                   {"max_iterations", c.newton.max_iterations},
                   {"damping", c.newton.damping},
                   {"continuation_step", c.newton.continuation_step}};
    j["output"] = c.output.string();
    return j.dump(2) + "\n";
}

std::vector<double> build_perturbation(const InitialSpec& spec, const LineGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> b(n, 0.0);
    if (spec.shape == Shape::none) return b;

    auto bump = [&](double c, double w) {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (grid.center(i) - c) / w;
            g[i] = std::exp(-z * z);
        }
        return g;
    };
    auto add = [&](const std::vector<double>& g, double a) {
        for (std::size_t i = 0; i < n; ++i) b[i] += a * g[i];
    };

    switch (spec.shape) {
    case Shape::none: break;
    case Shape::gaussian_bump:
        add(bump(spec.center, spec.width), spec.amplitude);
        return b;
    case Shape::dipole:
        add(bump(spec.center - spec.offset, spec.width), spec.amplitude);
        add(bump(spec.center + spec.offset, spec.width), -spec.amplitude);
        break;
    case Shape::random_zero_mean: {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> pos(spec.center - spec.spread,
                                                   spec.center + spec.spread);
        std::uniform_real_distribution<double> mag(0.5, 1.0);
        std::vector<double> centers(static_cast<std::size_t>(spec.lobes));
        for (double& c : centers) c = pos(rng);
        std::sort(centers.begin(), centers.end());
        // alternate signs left to right so the lobes interlace
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            add(bump(centers[k], spec.width), sign * spec.amplitude * mag(rng));
        }
        break;
    }
    }

    // project out the mean along |b| itself, which keeps the support
    std::vector<double> env(n);
    double mass = 0.0, env_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        env[i] = std::abs(b[i]);
        mass += b[i];
        env_mass += env[i];
    }
    add(env, -mass / env_mass);
    return b;
}

void save_family(const StationaryFamily& family, const std::filesystem::path& path) {
    if (!family.flux.is_builtin()) {
        throw InvalidInput("save_family: only registry fluxes can be written to a family file");
    }
    json j;
    j["format"] = "perstab-family";
    j["version"] = 1;
    j["flux"] = {{"label", family.flux.label()}, {"params", family.flux.params()}};
    j["period"] = family.grid.period();
    j["n_cells"] = family.grid.size();
    j["stencil"] = to_string(family.stencil);
    j["p_grid"] = family.p_grid;
    json profiles = json::array(), dps = json::array();
    for (std::size_t k = 0; k < family.size(); ++k) {
        profiles.push_back(std::vector<double>(family.profiles[k].values().begin(),
                                               family.profiles[k].values().end()));
        dps.push_back(std::vector<double>(family.dp_profiles[k].values().begin(),
                                          family.dp_profiles[k].values().end()));
    }
    j["profiles"] = std::move(profiles);
    j["dp_profiles"] = std::move(dps);
    j["residuals"] = family.residuals;
    j["alpha"] = family.alpha;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InvalidInput("save_family: cannot write " + path.string());
    out << j.dump() << "\n";
}

StationaryFamily load_family(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open family file " + path.string());
    json j;
    try {
        j = json::parse(in);
        if (j.at("format") != "perstab-family" || j.at("version") != 1) {
            throw ConfigError("family file " + path.string() + ": unsupported format");
        }
        FluxParams params = j.at("flux").at("params").get<FluxParams>();
        FluxModel flux = rethrow_as_config("family file flux", [&] {
            return builtin_flux(j.at("flux").at("label").get<std::string>(), params);
        });
        const double period = j.at("period").get<double>();
        if (period != flux.period()) throw ConfigError("family file: period does not match flux");
        const CellGrid grid(j.at("n_cells").get<std::size_t>(), period);
        const CellStencil stencil = parse_cell_stencil(j.at("stencil").get<std::string>());
        std::vector<double> p_grid = j.at("p_grid").get<std::vector<double>>();
        auto rows = j.at("profiles").get<std::vector<std::vector<double>>>();
        auto dp_rows = j.at("dp_profiles").get<std::vector<std::vector<double>>>();
        if (rows.size() != p_grid.size() || dp_rows.size() != p_grid.size()) {
            throw ConfigError("family file: profile count does not match p_grid");
        }
        std::vector<Profile> profiles, dp_profiles;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            profiles.emplace_back(grid, std::move(rows[k]));
            dp_profiles.emplace_back(grid, std::move(dp_rows[k]));
        }
        StationaryFamily f{flux,
                           grid,
                           stencil,
                           std::move(p_grid),
                           std::move(profiles),
                           std::move(dp_profiles),
                           j.at("residuals").get<std::vector<double>>(),
                           j.at("alpha").get<double>()};
        return f;
    } catch (const json::exception& e) {
        throw ConfigError("family file " + path.string() + ": " + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError("family file " + path.string() + ": " + e.what());
    }
}

} // namespace perstab
