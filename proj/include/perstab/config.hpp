#pragma once

#include "perstab/errors.hpp"
#include "perstab/evolution.hpp"
#include "perstab/flux.hpp"
#include "perstab/grid.hpp"
#include "perstab/stationary.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace perstab {

/// Thrown for any malformed or inconsistent scenario file (exit code 2).
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

struct FluxSpec {
    std::string label = "forced_burgers";
    FluxParams params;
};

struct GridSpec {
    std::size_t n_cells_per_period = 128;
    std::size_t n_periods = 64;
    BoundaryMode boundary_mode = BoundaryMode::pinned_to_wp;
};

struct FamilySpec {
    double p_min = -1.0;
    double p_max = 1.0;
    std::size_t M = 64;
    CellStencil stencil = CellStencil::engquist_osher;
    double roundtrip_tol = 1e-8; ///< M is doubled until inversion error is below this
    int max_doublings = 5;
    std::optional<std::filesystem::path> file; ///< load instead of building
};

enum class Shape { none, gaussian_bump, dipole, random_zero_mean };

struct InitialSpec {
    Shape shape = Shape::none;
    double amplitude = 0.0;
    double width = 0.5;      ///< Gaussian exp(-((x - c) / width)^2)
    double center = 0.0;
    double offset = 2.0;     ///< dipole lobes at center -/+ offset
    double spread = 4.0;     ///< random_zero_mean lobes lie in center +- spread
    int lobes = 6;           ///< random_zero_mean lobe count
    std::uint64_t seed = 0;
};

struct ScheduleSpec {
    enum class Kind { linear, log } kind = Kind::log;
    double t_lo = 10.0;
    double t_hi = 100.0;
    std::size_t count = 16;
    bool include_start = true; ///< also observe at t = 0

    std::vector<double> times() const;
};

struct RunSpec {
    double t_end = 100.0;
    ScheduleSpec schedule;
    double cfl_fraction = 0.9;
    double dt_max = 0.05;
};

struct VerifySpec {
    int trials = 20;
    std::uint64_t seed = 42;
    double t_end = 2.0;
    double amplitude = 0.5;
};

struct Targets {
    double linf_V_ratio = 0.1;
    double l1_ratio = 0.1;
    double dispersion_exponent = -0.20;
    double dispersion_r_squared = 0.9;
    std::pair<double, double> dispersion_window{10.0, 100.0};
};

/// One scenario file. See configs/ for examples and README for every key.
struct ScenarioConfig {
    std::string name = "scenario";
    FluxSpec flux;
    double p = 0.0; ///< mean of the background stationary profile (must be a family knot)
    GridSpec grid;
    FamilySpec family;
    InitialSpec initial;
    RunSpec run;
    VerifySpec verify;
    Targets targets;
    std::vector<std::string> checks;
    std::optional<double> lap_hysteresis;
    NewtonConfig newton;
    std::filesystem::path output = "out";

    /// Throws ConfigError naming the offending key.
    void validate() const;
    bool check_enabled(const std::string& name) const;
};

ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& json_text);
/// Canonical JSON echo of every field (defaults included).
std::string dump_config(const ScenarioConfig& cfg);

/// Checks that a config may enable.
const std::vector<std::string>& known_checks();

/// Perturbation b on the line; dipole and random_zero_mean are projected onto
/// exactly zero discrete mean.
std::vector<double> build_perturbation(const InitialSpec& spec, const LineGrid& grid);

/// Family file (JSON): flux label + params, period, n_cells, stencil, p_grid,
/// profiles, dp_profiles, residuals, alpha.
void save_family(const StationaryFamily& family, const std::filesystem::path& path);
StationaryFamily load_family(const std::filesystem::path& path);

} // namespace perstab
