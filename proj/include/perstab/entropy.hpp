#pragma once

#include "perstab/evolution.hpp"
#include "perstab/series.hpp"
#include "perstab/stationary.hpp"

#include <span>
#include <utility>
#include <vector>

namespace perstab {

/// Monotone piecewise-cubic interpolation of p -> w_p(x_i) for every cell,
/// using the family's d_p w as knot slopes (Fritsch-Carlson limited).
class FamilyInterpolant {
public:
    explicit FamilyInterpolant(const StationaryFamily& family);

    const StationaryFamily& family() const noexcept { return family_; }
    std::size_t cells() const noexcept { return n_; }
    double p_min() const noexcept { return p_.front(); }
    double p_max() const noexcept { return p_.back(); }
    std::span<const double> knots() const noexcept { return p_; }

    /// W(p, i) and its p-derivative; p must lie inside [p_min, p_max].
    double value(double p, std::size_t cell) const;
    double slope(double p, std::size_t cell) const;

    /// Range of d W / d p over all cells and intervals (exact for the cubics).
    double min_slope() const noexcept { return min_slope_; }
    double max_slope() const noexcept { return max_slope_; }

    /// Solves W(pi, i) = u. Exact knot values return the knot p exactly.
    /// Throws RangeError if u is not bracketed by the family at this cell.
    double invert(double u, std::size_t cell) const;

private:
    std::size_t interval(double p) const;
    // power-form cubic on [p_j, p_{j+1}] in local t = (p - p_j) / (p_{j+1} - p_j)
    const double* coeffs(std::size_t j, std::size_t cell) const {
        return &c_[4 * (cell * (p_.size() - 1) + j)];
    }

    StationaryFamily family_;
    std::size_t n_;
    std::vector<double> p_;
    std::vector<double> c_;
    double min_slope_ = 0.0;
    double max_slope_ = 0.0;
};

/// pi with w_pi(x_i) = u_value: bisection over the knots, then the monotone
/// cubic. The interpolant is rebuilt on each call; use FamilyInterpolant for
/// repeated queries.
double invert_p(const StationaryFamily& family, double u_value, std::size_t cell_index);

/// Max over cells and interval midpoints of |invert(w_true(p_mid)) - p_mid|,
/// where w_true is a fresh cell solve at p_mid.
double family_roundtrip_error(const StationaryFamily& family, const NewtonConfig& cfg = {});

/// Builds the family with M, 2M, 4M, ... until family_roundtrip_error <= tol
/// (at most `max_doublings` doublings; SolverError otherwise).
StationaryFamily build_resolved_family(const FluxModel& flux, double p_min, double p_max,
                                       std::size_t M, const CellGrid& grid, double tol = 1e-8,
                                       int max_doublings = 4, const NewtonConfig& cfg = {},
                                       CellStencil stencil = CellStencil::centered);

struct EntropyField {
    std::vector<double> pi;  ///< p(u_i, x_i)
    std::vector<double> eta; ///< int_{p_ref}^{pi} (u - w_p) dp
    double total_eta = 0.0;  ///< h sum eta
    double dissipation = 0.0; ///< h sum W'(pi) (D pi)^2
    double l1_pi = 0.0;      ///< h sum |pi - p_ref|
};

/// Entropy relative to the background w_{p_ref}. Every u_i must be bracketed by
/// the family (RangeError otherwise). Centred differences of pi in the interior,
/// one-sided at the ends of a pinned line, wrapped on a periodic one.
EntropyField eta_field(const FamilyInterpolant& interp, const State& state, double p_ref = 0.0,
                       double rel_tol = 1e-8);
EntropyField eta_field(const StationaryFamily& family, const State& state, double p_ref = 0.0);

struct EntropyBalanceReport {
    std::vector<double> residuals; ///< r_k for k = 1 .. K-2
    double max_abs = 0.0;
};

/// r_k = (E_{k+1} - E_{k-1}) / (2 dt) + D_k at interior snapshots. Times must
/// be uniformly spaced (relative 1e-9) and there must be at least 3.
EntropyBalanceReport entropy_balance_check(std::span<const double> times,
                                           std::span<const double> total_eta,
                                           std::span<const double> dissipation);

struct DispersionFit {
    std::pair<double, double> window;
    double exponent = 0.0;  ///< slope of log |u - w_p|_2 against log t
    double intercept = 0.0; ///< fitted intercept
    double constant = 0.0;  ///< exp(intercept)
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log l2_dist against log t over snapshots with t in the
/// window. Needs >= 8 points (InvalidInput); AlreadyConverged if any distance
/// in the window is zero.
DispersionFit dispersion_fit(const DiagnosticsSeries& series, std::pair<double, double> window);

/// |pi|_2 / (|pi|_1^{2/3} |d_x pi|_2^{1/3}) with forward differences (wrapped
/// when `periodic`). AlreadyConverged if the denominator vanishes.
double nash_ratio(std::span<const double> pi, double h, bool periodic = false);

} // namespace perstab
