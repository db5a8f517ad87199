#pragma once

#include "perstab/entropy.hpp"
#include "perstab/evolution.hpp"
#include "perstab/series.hpp"

#include <optional>
#include <span>
#include <vector>

namespace perstab {

struct LapConfig {
    /// Dead band; unset means 10 * machine epsilon * max |samples|.
    std::optional<double> hysteresis;

    double resolve(std::span<const double> samples) const;
};

/// Number of direction reversals, ignoring excursions smaller than the
/// hysteresis. Zero for monotone or constant data. Needs >= 3 samples.
int lap_number(std::span<const double> samples, const LapConfig& cfg = {});

/// Transitions between values above +hysteresis and below -hysteresis.
int sign_changes(std::span<const double> samples, const LapConfig& cfg = {});

/// h sum theta_i V_i^2. theta must be positive (InvalidInput otherwise).
double weighted_energy(std::span<const double> theta, std::span<const double> V, double h);

struct L1BoundReport {
    double lhs = 0.0;   ///< h sum |u - background|
    double rhs = 0.0;   ///< 2 (m + 1) max |V|
    int laps = 0;       ///< m
    bool passed = false; ///< lhs <= rhs + 1e-9
};

/// Checks |u - background|_1 <= 2 (m + 1) |V|_inf with m the lap number of V.
L1BoundReport l1_bound_check(const State& state, std::span<const double> V, int laps);

/// Inputs for the standard snapshot observer. Optional parts fill their
/// columns only when present.
struct DiagnosticsContext {
    double initial_mass = 0.0;                    ///< subtracted for mass_offset
    /// Unset hysteresis means the rounding level of the data: 10 eps max|u| for
    /// sign changes and 10 eps max|u| times the line length for V.
    LapConfig lap;
    std::optional<std::vector<double>> theta;     ///< tiled over the line
    const FamilyInterpolant* entropy = nullptr;   ///< enables entropy columns
    double p_ref = 0.0;
};

/// Copies total_eta, dissipation and l1_pi into the row and sets nash_ratio
/// (left unset once pi - p_ref vanishes).
void fill_entropy_columns(const EntropyField& e, const State& s, double p_ref,
                          DiagnosticsRow& row);

/// Observer filling l1/l2 distances, V norms, lap and sign counts, the mass
/// offset, and, when configured, weighted energy and the entropy columns.
Observer diagnostics_observer(DiagnosticsContext ctx);

} // namespace perstab
