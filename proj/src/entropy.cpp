#include "perstab/entropy.hpp"

#include "perstab/errors.hpp"
#include "perstab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace perstab {

FamilyInterpolant::FamilyInterpolant(const StationaryFamily& family)
    : family_(family), n_(family.grid.size()), p_(family.p_grid) {
    const std::size_t K = p_.size();
    if (K < 2) throw InvalidInput("FamilyInterpolant: need at least two knots");
    c_.assign(4 * n_ * (K - 1), 0.0);
    min_slope_ = std::numeric_limits<double>::infinity();
    max_slope_ = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j + 1 < K; ++j) {
            const double dp = p_[j + 1] - p_[j];
            const double y0 = family.profiles[j][i], y1 = family.profiles[j + 1][i];
            double m0 = family.dp_profiles[j][i], m1 = family.dp_profiles[j + 1][i];
            const double secant = (y1 - y0) / dp;
            if (!(secant > 0.0)) {
                throw SolverError("FamilyInterpolant: family not increasing at cell " +
                                  std::to_string(i) + " between knots " + std::to_string(j) +
                                  " and " + std::to_string(j + 1));
            }
            // Fritsch-Carlson: keep (m0, m1)/secant inside the circle of radius 3.
            const double a = m0 / secant, b = m1 / secant;
            if (a * a + b * b > 9.0) {
                const double tau = 3.0 / std::hypot(a, b);
                m0 = tau * a * secant;
                m1 = tau * b * secant;
            }
            double* c = &c_[4 * (i * (K - 1) + j)];
            c[0] = y0;
            c[1] = dp * m0;
            c[2] = 3.0 * (y1 - y0) - 2.0 * dp * m0 - dp * m1;
            c[3] = 2.0 * (y0 - y1) + dp * m0 + dp * m1;

            // extremes of the quadratic derivative on [0, 1]
            auto d = [&](double t) { return (c[1] + t * (2.0 * c[2] + 3.0 * c[3] * t)) / dp; };
            double lo = std::min(d(0.0), d(1.0)), hi = std::max(d(0.0), d(1.0));
            if (c[3] != 0.0) {
                const double t = -c[2] / (3.0 * c[3]);
                if (t > 0.0 && t < 1.0) {
                    lo = std::min(lo, d(t));
                    hi = std::max(hi, d(t));
                }
            }
            min_slope_ = std::min(min_slope_, lo);
            max_slope_ = std::max(max_slope_, hi);
        }
    }
}

std::size_t FamilyInterpolant::interval(double p) const {
    if (!(p >= p_.front() && p <= p_.back())) {
        throw InvalidInput("FamilyInterpolant: p = " + format_real(p) + " outside the family");
    }
    auto it = std::upper_bound(p_.begin(), p_.end(), p);
    std::size_t j = static_cast<std::size_t>(it - p_.begin());
    j = j == 0 ? 0 : j - 1;
    return std::min(j, p_.size() - 2);
}

double FamilyInterpolant::value(double p, std::size_t cell) const {
    const std::size_t j = interval(p);
    const double t = (p - p_[j]) / (p_[j + 1] - p_[j]);
    const double* c = coeffs(j, cell);
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double FamilyInterpolant::slope(double p, std::size_t cell) const {
    const std::size_t j = interval(p);
    const double dp = p_[j + 1] - p_[j];
    const double t = (p - p_[j]) / dp;
    const double* c = coeffs(j, cell);
    return (c[1] + t * (2.0 * c[2] + 3.0 * c[3] * t)) / dp;
}

double FamilyInterpolant::invert(double u, std::size_t cell) const {
    const std::size_t K = p_.size();
    const double lo = family_.profiles.front()[cell];
    const double hi = family_.profiles.back()[cell];
    if (!(u >= lo && u <= hi)) {
        throw RangeError("invert_p: u = " + format_real(u) + " at cell " + std::to_string(cell) +
                             " is outside the family bracket [" + format_real(lo) + ", " +
                             format_real(hi) + "]; widen the family",
                         cell, u);
    }
    // largest j with w_j <= u
    std::size_t a = 0, b = K - 1;
    while (b - a > 1) {
        const std::size_t mid = (a + b) / 2;
        if (family_.profiles[mid][cell] <= u) a = mid;
        else b = mid;
    }
    if (family_.profiles[a][cell] == u) return p_[a];
    if (family_.profiles[b][cell] == u) return p_[b];

    const double* c = coeffs(a, cell);
    auto H = [&](double t) { return c[0] + t * (c[1] + t * (c[2] + t * c[3])) - u; };
    auto dH = [&](double t) { return c[1] + t * (2.0 * c[2] + 3.0 * c[3] * t); };
    double tl = 0.0, tr = 1.0;
    double t = (u - c[0]) / (family_.profiles[b][cell] - c[0]);
    const double scale = std::abs(u) + std::abs(c[0]) + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double r = H(t);
        if (std::abs(r) <= 2.0 * std::numeric_limits<double>::epsilon() * scale) break;
        if (r > 0.0) tr = t;
        else tl = t;
        const double d = dH(t);
        double next = d > 0.0 ? t - r / d : 0.5 * (tl + tr);
        if (!(next > tl && next < tr)) next = 0.5 * (tl + tr);
        if (tr - tl <= 4.0 * std::numeric_limits<double>::epsilon()) break;
        t = next;
    }
    return p_[a] + t * (p_[b] - p_[a]);
}

double invert_p(const StationaryFamily& family, double u_value, std::size_t cell_index) {
    if (cell_index >= family.grid.size()) throw InvalidInput("invert_p: cell index out of range");
    return FamilyInterpolant(family).invert(u_value, cell_index);
}

double family_roundtrip_error(const StationaryFamily& family, const NewtonConfig& cfg) {
    const FamilyInterpolant interp(family);
    double err = 0.0;
    for (std::size_t j = 0; j + 1 < family.size(); ++j) {
        const double pm = 0.5 * (family.p_grid[j] + family.p_grid[j + 1]);
        const Profile w = solve_stationary(family.flux, pm, family.grid, cfg, family.profiles[j],
                                           family.stencil);
        for (std::size_t i = 0; i < w.size(); ++i) {
            err = std::max(err, std::abs(interp.invert(w[i], i) - pm));
        }
    }
    return err;
}

StationaryFamily build_resolved_family(const FluxModel& flux, double p_min, double p_max,
                                       std::size_t M, const CellGrid& grid, double tol,
                                       int max_doublings, const NewtonConfig& cfg,
                                       CellStencil stencil) {
    double err = 0.0;
    for (int k = 0; k <= max_doublings; ++k, M *= 2) {
        StationaryFamily fam = build_family(flux, p_min, p_max, M, grid, cfg, stencil);
        err = family_roundtrip_error(fam, cfg);
        if (err <= tol) return fam;
    }
    throw SolverError("build_resolved_family: inversion error " + format_real(err) +
                      " above tolerance after " + std::to_string(max_doublings) + " doublings");
}

EntropyField eta_field(const FamilyInterpolant& interp, const State& state, double p_ref,
                       double rel_tol) {
    const LineGrid& g = state.grid();
    if (!(interp.family().grid == g.cell())) {
        throw InvalidInput("eta_field: family and state use different cell grids");
    }
    if (!(p_ref >= interp.p_min() && p_ref <= interp.p_max())) {
        throw InvalidInput("eta_field: p_ref outside the family range");
    }
    const auto u = state.u();
    const std::size_t n = u.size();
    const double h = g.spacing();
    EntropyField e;
    e.pi.resize(n);
    e.eta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = g.cell_index(i);
        const double pi = interp.invert(u[i], c);
        e.pi[i] = pi;
        if (pi == p_ref) {
            e.eta[i] = 0.0;
        } else {
            // one Simpson run per knot interval, where the integrand is a single cubic
            const double ui = u[i];
            const auto f = [&](double p) { return ui - interp.value(p, c); };
            const double lo = std::min(pi, p_ref), hi = std::max(pi, p_ref);
            const auto knots = interp.knots();
            // below this the integrand is rounding noise of u - W
            const double noise =
                4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(ui));
            auto k = std::upper_bound(knots.begin(), knots.end(), lo);
            double a = lo, sum = 0.0;
            for (; k != knots.end() && *k < hi; ++k) {
                sum += adaptive_simpson(f, a, *k, rel_tol, noise * (*k - a));
                a = *k;
            }
            sum += adaptive_simpson(f, a, hi, rel_tol, noise * (hi - a));
            e.eta[i] = pi > p_ref ? sum : -sum;
        }
        e.total_eta += e.eta[i];
        e.l1_pi += std::abs(pi - p_ref);
    }
    e.total_eta *= h;
    e.l1_pi *= h;

    const bool periodic = g.boundary() == BoundaryMode::periodic;
    double diss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (periodic) {
            d = (e.pi[(i + 1) % n] - e.pi[(i + n - 1) % n]) / (2.0 * h);
        } else if (i == 0) {
            d = (e.pi[1] - e.pi[0]) / h;
        } else if (i == n - 1) {
            d = (e.pi[n - 1] - e.pi[n - 2]) / h;
        } else {
            d = (e.pi[i + 1] - e.pi[i - 1]) / (2.0 * h);
        }
        diss += interp.slope(e.pi[i], g.cell_index(i)) * d * d;
    }
    e.dissipation = diss * h;
    return e;
}

EntropyField eta_field(const StationaryFamily& family, const State& state, double p_ref) {
    return eta_field(FamilyInterpolant(family), state, p_ref);
}

EntropyBalanceReport entropy_balance_check(std::span<const double> times,
                                           std::span<const double> total_eta,
                                           std::span<const double> dissipation) {
    const std::size_t K = times.size();
    if (K < 3) throw InvalidInput("entropy_balance_check: need at least 3 snapshots");
    if (total_eta.size() != K || dissipation.size() != K) {
        throw InvalidInput("entropy_balance_check: series lengths differ");
    }
    const double dt = (times[K - 1] - times[0]) / static_cast<double>(K - 1);
    for (std::size_t k = 1; k < K; ++k) {
        if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(dt, std::abs(times[k]))) {
            throw InvalidInput("entropy_balance_check: snapshots are not uniformly spaced");
        }
    }
    EntropyBalanceReport r;
    for (std::size_t k = 1; k + 1 < K; ++k) {
        const double res = (total_eta[k + 1] - total_eta[k - 1]) / (2.0 * dt) + dissipation[k];
        r.residuals.push_back(res);
        r.max_abs = std::max(r.max_abs, std::abs(res));
    }
    return r;
}

DispersionFit dispersion_fit(const DiagnosticsSeries& series, std::pair<double, double> window) {
    const auto [lo, hi] = window;
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("dispersion_fit: need 0 < t_lo < t_hi");
    if (series.empty() || lo < series.times.front() || hi > series.times.back()) {
        throw InvalidInput("dispersion_fit: window outside the recorded times");
    }
    std::vector<double> x, y;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double t = series.times[k];
        if (t < lo || t > hi) continue;
        const double d = series.l2_dist[k];
        if (std::isnan(d)) throw InvalidInput("dispersion_fit: l2_dist not recorded");
        if (!(d > 0.0)) {
            throw AlreadyConverged("dispersion_fit: distance is zero at t = " + format_real(t));
        }
        x.push_back(std::log(t));
        y.push_back(std::log(d));
    }
    if (x.size() < 8) {
        throw InvalidInput("dispersion_fit: " + std::to_string(x.size()) +
                           " snapshots in the window, need at least 8");
    }
    const LinearFit f = least_squares(x, y);
    DispersionFit out;
    out.window = window;
    out.exponent = f.slope;
    out.intercept = f.intercept;
    out.constant = std::exp(f.intercept);
    out.r_squared = f.r_squared;
    out.points = x.size();
    return out;
}

double nash_ratio(std::span<const double> pi, double h, bool periodic) {
    if (pi.size() < 2) throw InvalidInput("nash_ratio: need at least two samples");
    const double l1 = norm(pi, h, NormKind::L1);
    const double l2 = norm(pi, h, NormKind::L2);
    const std::size_t n = pi.size();
    double grad2 = 0.0;
    const std::size_t m = periodic ? n : n - 1;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = (pi[(i + 1) % n] - pi[i]) / h;
        grad2 += d * d;
    }
    const double grad = std::sqrt(grad2 * h);
    const double denom = std::cbrt(l1 * l1) * std::cbrt(grad);
    if (!(denom > 0.0)) throw AlreadyConverged("nash_ratio: zero denominator");
    return l2 / denom;
}

} // namespace perstab
