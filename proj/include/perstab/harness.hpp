#pragma once

#include "perstab/config.hpp"
#include "perstab/diagnostics.hpp"
#include "perstab/entropy.hpp"
#include "perstab/evolution.hpp"
#include "perstab/series.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace perstab {

enum ExitCode : int {
    kExitPass = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitSolverError = 3,
    kExitEdgeBuffer = 4,
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Machine-readable outcome of one command; always written as verdict.json.
struct Verdict {
    std::string command;
    std::string scenario;
    std::vector<CheckResult> checks;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
    std::vector<std::string> artifacts; ///< paths relative to the output directory
    int exit_code = kExitPass;
    std::string error;

    bool all_passed() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
};

std::string verdict_json(const Verdict& v);
void write_verdict(const Verdict& v, const std::filesystem::path& out_dir);

/// Fraction of |u - background|_1 lying in the outer 10% of the line at each end.
double edge_fraction(const State& state);
/// Throws EdgeBufferViolation if edge_fraction exceeds `tol`.
void check_edge_buffer(const State& state, double tol = 1e-6);

/// Family from config.family.file, or built and refined until the inversion
/// round trip meets config.family.roundtrip_tol.
StationaryFamily resolve_family(const ScenarioConfig& cfg);

/// Per-cell entropy checks accumulated over all snapshots. Each cell is allowed
/// slack = 1e-8 |eta_i| + 16 eps (1 + |u_i|) |pi_i - p_ref|; the second term is
/// the rounding level of the integrand u - W(p).
struct EntropyExtremes {
    double min_eta = 0.0;
    double worst_negative = 0.0; ///< max of -eta_i - floor_i (<= 0 passes)
    double worst_lower = 0.0;    ///< max of alpha (pi-p)^2/2 - eta_i - slack_i
    double worst_upper = 0.0;    ///< max of eta_i - C (pi-p)^2/2 - slack_i
    double worst_pi_bound = 0.0; ///< max of |pi - p|_1 - |b|_1 / alpha
    double alpha_eff = 0.0;
    double c_eff = 0.0;
};

struct ScenarioRun {
    ScenarioConfig config;
    std::shared_ptr<StationaryFamily> family;
    std::shared_ptr<FamilyInterpolant> interp;
    std::optional<Profile> background;
    std::optional<LineGrid> grid;
    std::optional<State> initial;
    std::optional<EvolveResult> result;
    EntropyExtremes entropy;
    double max_edge_fraction = 0.0;
};

struct RunOptions {
    bool entropy = true;                                 ///< eta columns and extremes
    std::optional<std::filesystem::path> snapshot_dir;   ///< x,u,background CSV per snapshot
    std::optional<std::filesystem::path> family;         ///< reuse instead of resolving
};

/// Builds everything the config describes and evolves it. Throws
/// EdgeBufferViolation if the initial perturbation touches the edge buffer.
ScenarioRun run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Invariant checks that the config enables, evaluated on a finished run.
void evaluate_run_checks(const ScenarioRun& run, Verdict& v);

Verdict cmd_stationary(const ScenarioConfig& cfg, const std::filesystem::path& out);
Verdict cmd_evolve(const ScenarioConfig& cfg, const std::filesystem::path& out);
Verdict cmd_verify(const ScenarioConfig& cfg, const std::filesystem::path& out);
Verdict cmd_dispersion(const ScenarioConfig& cfg, const std::filesystem::path& out);
Verdict cmd_lap(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// Loads the config, applies overrides, runs the named command and always
/// writes verdict.json. Returns the process exit code.
struct CommandOverrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CommandOverrides& overrides = {});

} // namespace perstab
