#pragma once

#include "perstab/flux.hpp"
#include "perstab/grid.hpp"
#include "perstab/series.hpp"
#include "perstab/stationary.hpp"

#include <functional>
#include <span>
#include <vector>

namespace perstab {

/// Solution on the line at a given time, together with the stationary profile
/// it is compared against (and, in pinned mode, pinned to at the ends).
class State {
public:
    State(LineGrid grid, std::vector<double> u, double time, Profile background);

    /// u = background tiled + perturbation.
    static State perturbed(LineGrid grid, Profile background, std::span<const double> perturbation,
                           double time = 0.0);

    const LineGrid& grid() const noexcept { return grid_; }
    std::span<const double> u() const noexcept { return u_; }
    std::vector<double>& mutable_u() noexcept { return u_; }
    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }
    const Profile& background() const noexcept { return background_; }

    double background_at(std::size_t i) const noexcept {
        return background_[grid_.cell_index(i)];
    }
    std::vector<double> background_values() const { return background_.tile(grid_); }
    /// u - background.
    std::vector<double> perturbation() const;
    /// h sum (u_i - background_i).
    double perturbation_mass() const;

private:
    LineGrid grid_;
    std::vector<double> u_;
    double time_;
    Profile background_;
};

enum class Scheme { engquist_osher_imex };

struct StepPolicy {
    double cfl_fraction = 0.9;
    double dt_max = 0.05;
    Scheme scheme = Scheme::engquist_osher_imex;

    void validate() const;
};

/// Largest dt for which the explicit convection update is monotone:
/// h / max_i (max(f_u(u_i, x_{i+1/2}), 0) - min(f_u(u_i, x_{i-1/2}), 0)).
/// Infinite when the flux is locally constant in u.
double cfl_limit(const State& state, const FluxModel& flux);

/// cfl_fraction * cfl_limit, capped by dt_max.
double stable_dt(const State& state, const FluxModel& flux, const StepPolicy& policy);

/// One IMEX step: explicit Engquist-Osher convection, then backward-Euler
/// diffusion. Throws CflViolation if dt exceeds cfl_limit.
State step(const State& state, const FluxModel& flux, double dt);

/// Profile on the cell grid that the scheme leaves exactly invariant: the cell
/// problem solved with the Engquist-Osher stencil.
Profile discrete_background(const FluxModel& flux, double p, const CellGrid& grid,
                            const NewtonConfig& cfg = {});

/// Called at each snapshot; fills its columns of the row.
using Observer = std::function<void(const State&, DiagnosticsRow&)>;

struct EvolveResult {
    State state;
    DiagnosticsSeries series;
    std::size_t steps = 0;
};

/// Steps to t_end, landing exactly on every snapshot time (which may include
/// the start time). Each snapshot appends one row after all observers ran.
EvolveResult evolve(const State& state, const FluxModel& flux, double t_end,
                    const StepPolicy& policy, std::span<const double> snapshot_times = {},
                    const std::vector<Observer>& observers = {});

/// Picard iteration of the mild (Duhamel) formulation
///   u(t) = K^t * u0 - int_0^t K^{t-s} * d_x f(u(s), .) ds
/// on a periodic line, starting from u(s) = u0. K is the mass-one heat kernel,
/// sampled, wrapped periodically and renormalised on the grid; the s integral
/// uses the midpoint rule on `time_subintervals` panels (>= 32). Throws
/// SolverError when an iterate leaves the ball of radius 2 |u0|_inf, which
/// means t is too large for the contraction argument.
/// Guidance: t <= 0.1 / (local max |f_u|)^2.
State duhamel_picard(const State& u0, const FluxModel& flux, double t, int iterations,
                     int time_subintervals = 32);

/// Circular convolution with the sampled mass-one heat kernel at time tau.
std::vector<double> heat_convolve(std::span<const double> v, const LineGrid& grid, double tau);

} // namespace perstab
