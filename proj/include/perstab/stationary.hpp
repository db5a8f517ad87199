#pragma once

#include "perstab/flux.hpp"
#include "perstab/grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace perstab {

struct NewtonConfig {
    double tolerance = 1e-11; ///< on the residual L-infinity norm
    int max_iterations = 50;
    double damping = 0.5;           ///< backtracking factor
    double continuation_step = 0.1; ///< largest warm-start step in p

    void validate() const;
};

/// Spatial stencil of the cell problem.
///
/// `centered` is the second-order discretisation -D2 w + D1 f(w, .). The
/// `engquist_osher` stencil replaces the convective term by the interface
/// fluxes of the evolution scheme, so its solutions are exact fixed points of
/// a time step.
enum class CellStencil { centered, engquist_osher };

std::string to_string(CellStencil stencil);
CellStencil parse_cell_stencil(const std::string& name);

/// Discrete residual of -w'' + (f(w, x))' = 0 on the periodic cell.
std::vector<double> stationary_residual(const FluxModel& flux, std::span<const double> w,
                                        const CellGrid& grid, CellStencil stencil);

/// Residual level below which evaluation roundoff dominates (relevant on fine
/// grids where the 1/h^2 scaling amplifies eps |w|).
double residual_roundoff_floor(const FluxModel& flux, std::span<const double> w,
                               const CellGrid& grid);

/// Solves the cell problem with prescribed mean p by bordered Newton.
/// Without a guess the constant profile p is used. Throws SolverError if Newton
/// does not converge or the bordered Jacobian is singular.
Profile solve_stationary(const FluxModel& flux, double p, const CellGrid& grid,
                         const NewtonConfig& cfg = {},
                         const std::optional<Profile>& initial_guess = std::nullopt,
                         CellStencil stencil = CellStencil::centered);

/// Kernel of the linearised cell operator at w_p, normalised to mean one.
Profile solve_dp_w(const FluxModel& flux, const Profile& w_p,
                   CellStencil stencil = CellStencil::centered);

/// Stationary profiles on a uniform p grid, increasing pointwise in p.
struct StationaryFamily {
    FluxModel flux;
    CellGrid grid;
    CellStencil stencil;
    std::vector<double> p_grid;       ///< p_0 < ... < p_M
    std::vector<Profile> profiles;    ///< w at each p_j
    std::vector<Profile> dp_profiles; ///< d_p w at each p_j
    std::vector<double> residuals;    ///< final residual of each solve
    double alpha;                     ///< min of all dp_profiles values

    std::size_t size() const noexcept { return p_grid.size(); }
    double dp_max() const;
    /// Knot index whose p equals `p` exactly, if any.
    std::optional<std::size_t> knot_of(double p) const;
};

/// p_j = p_min + j (p_max - p_min) / M for j = 0..M, solved by continuation
/// outward from the knot nearest zero. M >= 16.
StationaryFamily build_family(const FluxModel& flux, double p_min, double p_max, std::size_t M,
                              const CellGrid& grid, const NewtonConfig& cfg = {},
                              CellStencil stencil = CellStencil::centered);

/// Checks every family invariant; throws SolverError naming the first violation.
void check_family(const StationaryFamily& family, double mean_tol = 1e-10,
                  double dp_mean_tol = 1e-8);

/// Weight theta > 0 with mean one solving (theta b)' + theta'' = 0, where
/// b = d_u f(0, .). The flux must satisfy f(0, .) = 0. Solved by a bordered
/// linear system and verified against the integrating-factor recurrence.
Profile solve_theta(const FluxModel& flux, const CellGrid& grid);

/// The same discrete weight from the once-integrated form
/// (theta_{i+1} - theta_i)/h + (b_{i+1} theta_{i+1} + b_i theta_i)/2 = c.
Profile solve_theta_integrating_factor(const FluxModel& flux, const CellGrid& grid);

/// Shifted flux g(v, x) = f(v + w_p(x), x) - f(w_p(x), x), with w_p extended to
/// all x by a periodic cubic spline.
FluxModel normalize_about_wp(const FluxModel& flux, const Profile& w_p);

/// L-infinity distance between a coarse profile and a profile on the twice
/// finer grid, the latter interpolated to the coarse centres (4-point cubic).
double coarse_fine_distance(const Profile& coarse, const Profile& fine);

/// Observed order log2(e(n)/e(2n)) from solves at n, 2n and 4n cells.
double grid_refinement_order(const FluxModel& flux, double p, std::size_t n,
                             const NewtonConfig& cfg = {});

} // namespace perstab
