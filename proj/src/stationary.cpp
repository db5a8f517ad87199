#include "perstab/stationary.hpp"

#include "perstab/errors.hpp"
#include "perstab/periodic_spline.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace perstab {

void NewtonConfig::validate() const {
    if (!(tolerance > 0.0)) throw InvalidInput("NewtonConfig: tolerance must be positive");
    if (max_iterations < 1) throw InvalidInput("NewtonConfig: max_iterations must be >= 1");
    if (!(damping > 0.0 && damping < 1.0)) throw InvalidInput("NewtonConfig: damping must lie in (0,1)");
    if (!(continuation_step > 0.0)) throw InvalidInput("NewtonConfig: continuation_step must be positive");
}

std::string to_string(CellStencil stencil) {
    return stencil == CellStencil::centered ? "centered" : "engquist_osher";
}

CellStencil parse_cell_stencil(const std::string& name) {
    if (name == "centered") return CellStencil::centered;
    if (name == "engquist_osher") return CellStencil::engquist_osher;
    throw InvalidInput("unknown cell stencil '" + name + "'");
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Row i reads lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1}, indices periodic.
struct PeriodicTridiag {
    std::vector<double> lower, diag, upper;

    explicit PeriodicTridiag(std::size_t n) : lower(n), diag(n), upper(n) {}
};

void check_profile_matches(const FluxModel& flux, const CellGrid& grid) {
    if (std::abs(grid.period() - flux.period()) > 1e-12 * flux.period()) {
        throw InvalidInput("cell grid period differs from the flux period");
    }
}

/// Solves [J 1; 1^T/n 0] [x; mu] = [r; s]. Returns x, stores mu.
std::vector<double> bordered_solve(const PeriodicTridiag& J, std::span<const double> r, double s,
                                   double& mu) {
    const auto n = static_cast<Eigen::Index>(J.diag.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(5 * n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        triplets.emplace_back(i, (i + n - 1) % n, J.lower[k]);
        triplets.emplace_back(i, i, J.diag[k]);
        triplets.emplace_back(i, (i + 1) % n, J.upper[k]);
        triplets.emplace_back(i, n, 1.0);
        triplets.emplace_back(n, i, 1.0 / static_cast<double>(n));
    }
    Eigen::SparseMatrix<double> A(n + 1, n + 1);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
        throw SolverError("bordered Jacobian is singular (grid too coarse or kernel dimension != 1)");
    }
    Eigen::VectorXd rhs(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = r[static_cast<std::size_t>(i)];
    rhs[n] = s;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite()) {
        throw SolverError("bordered solve failed (singular bordered Jacobian)");
    }
    mu = sol[n];
    return {sol.data(), sol.data() + n};
}

PeriodicTridiag jacobian(const FluxModel& flux, std::span<const double> w, const CellGrid& grid,
                         CellStencil stencil) {
    const std::size_t n = w.size();
    const double h = grid.spacing();
    const double ih2 = 1.0 / (h * h);
    PeriodicTridiag J(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        const std::size_t ip = (i + 1) % n;
        if (stencil == CellStencil::centered) {
            J.lower[i] = -ih2 - flux.d_u(w[im], grid.center(im)) / (2.0 * h);
            J.diag[i] = 2.0 * ih2;
            J.upper[i] = -ih2 + flux.d_u(w[ip], grid.center(ip)) / (2.0 * h);
        } else {
            const double xr = grid.interface(i);  // i + 1/2
            const double xl = grid.interface(im); // i - 1/2
            J.upper[i] = std::min(flux.d_u(w[ip], xr), 0.0) / h - ih2;
            J.diag[i] = (std::max(flux.d_u(w[i], xr), 0.0) - std::min(flux.d_u(w[i], xl), 0.0)) / h +
                        2.0 * ih2;
            J.lower[i] = -std::max(flux.d_u(w[im], xl), 0.0) / h - ih2;
        }
    }
    return J;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

std::vector<double> stationary_residual(const FluxModel& flux, std::span<const double> w,
                                        const CellGrid& grid, CellStencil stencil) {
    const std::size_t n = grid.size();
    if (w.size() != n) throw InvalidInput("stationary_residual: size mismatch");
    const double h = grid.spacing();
    const double ih2 = 1.0 / (h * h);
    std::vector<double> R(n);
    if (stencil == CellStencil::centered) {
        std::vector<double> fv(n);
        for (std::size_t i = 0; i < n; ++i) fv[i] = flux.eval(w[i], grid.center(i));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t im = (i + n - 1) % n;
            const std::size_t ip = (i + 1) % n;
            R[i] = -(w[ip] - 2.0 * w[i] + w[im]) * ih2 + (fv[ip] - fv[im]) / (2.0 * h);
        }
    } else {
        std::vector<double> F(n); // F[i] sits on interface i + 1/2
        for (std::size_t i = 0; i < n; ++i) {
            F[i] = engquist_osher(flux, w[i], w[(i + 1) % n], grid.interface(i));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t im = (i + n - 1) % n;
            const std::size_t ip = (i + 1) % n;
            R[i] = (F[i] - F[im]) / h - (w[ip] - 2.0 * w[i] + w[im]) * ih2;
        }
    }
    return R;
}

double residual_roundoff_floor(const FluxModel& flux, std::span<const double> w,
                               const CellGrid& grid) {
    const double h = grid.spacing();
    double fmax = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        fmax = std::max(fmax, std::abs(flux.eval(w[i], grid.center(i))));
    }
    return 16.0 * kEps * (4.0 * max_abs(w) / (h * h) + 2.0 * fmax / h);
}

Profile solve_stationary(const FluxModel& flux, double p, const CellGrid& grid,
                         const NewtonConfig& cfg, const std::optional<Profile>& initial_guess,
                         CellStencil stencil) {
    cfg.validate();
    check_profile_matches(flux, grid);
    if (!std::isfinite(p)) throw InvalidInput("solve_stationary: p must be finite");
    const std::size_t n = grid.size();

    std::vector<double> w;
    if (initial_guess) {
        if (!(initial_guess->grid() == grid)) {
            throw InvalidInput("solve_stationary: initial guess lives on a different grid");
        }
        w.assign(initial_guess->values().begin(), initial_guess->values().end());
        const double shift = p - initial_guess->mean();
        for (double& v : w) v += shift;
    } else {
        w.assign(n, p);
    }

    std::vector<double> R = stationary_residual(flux, w, grid, stencil);
    double rn = max_abs(R);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (rn <= cfg.tolerance) return Profile(grid, std::move(w));
        const double floor = residual_roundoff_floor(flux, w, grid);

        const PeriodicTridiag J = jacobian(flux, w, grid, stencil);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -R[i];
        double mu = 0.0;
        const std::vector<double> delta = bordered_solve(J, rhs, 0.0, mu);
        const double step_size = max_abs(delta);
        if (rn <= floor && step_size <= 64.0 * kEps * (1.0 + max_abs(w))) {
            return Profile(grid, std::move(w)); // stagnated at roundoff
        }

        const double merit0 = l2(R);
        double s = 1.0;
        bool accepted = false;
        std::vector<double> trial(n);
        while (s > 1e-10) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] + s * delta[i];
            std::vector<double> Rt = stationary_residual(flux, trial, grid, stencil);
            const double merit = l2(Rt);
            if (std::isfinite(merit) && (merit < (1.0 - 1e-4 * s) * merit0 ||
                                         max_abs(Rt) <= std::max(cfg.tolerance, floor))) {
                w.swap(trial);
                R.swap(Rt);
                rn = max_abs(R);
                accepted = true;
                break;
            }
            s *= cfg.damping;
        }
        if (!accepted) {
            if (rn <= floor) return Profile(grid, std::move(w));
            std::ostringstream msg;
            msg << "solve_stationary: line search failed at p = " << p << " (residual " << rn << ")";
            throw SolverError(msg.str());
        }
    }
    if (rn <= cfg.tolerance || rn <= residual_roundoff_floor(flux, w, grid)) {
        return Profile(grid, std::move(w));
    }
    std::ostringstream msg;
    msg << "solve_stationary: Newton did not converge in " << cfg.max_iterations
        << " iterations at p = " << p << " (last residual " << rn << ")";
    throw SolverError(msg.str());
}

Profile solve_dp_w(const FluxModel& flux, const Profile& w_p, CellStencil stencil) {
    const CellGrid& grid = w_p.grid();
    check_profile_matches(flux, grid);
    const auto R = stationary_residual(flux, w_p.values(), grid, stencil);
    const double rn = max_abs(R);
    if (rn > std::max(1e-8, 4.0 * residual_roundoff_floor(flux, w_p.values(), grid))) {
        std::ostringstream msg;
        msg << "solve_dp_w: profile is not stationary (residual " << rn << ")";
        throw InvalidInput(msg.str());
    }
    const PeriodicTridiag J = jacobian(flux, w_p.values(), grid, stencil);
    const std::vector<double> zero(grid.size(), 0.0);
    double mu = 0.0;
    std::vector<double> phi = bordered_solve(J, zero, 1.0, mu);
    const double lo = *std::min_element(phi.begin(), phi.end());
    if (!(lo > 0.0)) {
        std::ostringstream msg;
        msg << "solve_dp_w: kernel vector is not positive (min " << lo << "); refine the grid";
        throw SolverError(msg.str());
    }
    return Profile(grid, std::move(phi));
}

double StationaryFamily::dp_max() const {
    double m = 0.0;
    for (const Profile& dp : dp_profiles) m = std::max(m, dp.max());
    return m;
}

std::optional<std::size_t> StationaryFamily::knot_of(double p) const {
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
        if (p_grid[j] == p) return j;
    }
    return std::nullopt;
}

namespace {

struct Member {
    Profile w;
    Profile dp;
};

Member continue_to(const FluxModel& flux, const Member& from, double p_from, double p_to,
                   const NewtonConfig& cfg, CellStencil stencil) {
    const CellGrid& grid = from.w.grid();
    double step = std::copysign(std::min(cfg.continuation_step, std::abs(p_to - p_from)), p_to - p_from);
    double p = p_from;
    Member cur = from;
    while (p != p_to) {
        const double target = std::abs(p_to - p) <= std::abs(step) ? p_to : p + step;
        std::vector<double> guess(grid.size());
        for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = cur.w[i] + (target - p) * cur.dp[i];
        try {
            Profile w = solve_stationary(flux, target, grid, cfg, Profile(grid, std::move(guess)), stencil);
            Profile dp = solve_dp_w(flux, w, stencil);
            cur = Member{std::move(w), std::move(dp)};
            p = target;
        } catch (const SolverError&) {
            step *= 0.5;
            if (std::abs(step) < 1e-8) throw;
        }
    }
    return cur;
}

} // namespace

StationaryFamily build_family(const FluxModel& flux, double p_min, double p_max, std::size_t M,
                              const CellGrid& grid, const NewtonConfig& cfg, CellStencil stencil) {
    cfg.validate();
    if (!(p_min < p_max)) throw InvalidInput("build_family: need p_min < p_max");
    if (M < 16) throw InvalidInput("build_family: need M >= 16");

    std::vector<double> p_grid(M + 1);
    for (std::size_t j = 0; j <= M; ++j) {
        p_grid[j] = p_min + (p_max - p_min) * static_cast<double>(j) / static_cast<double>(M);
    }
    p_grid[M] = p_max;

    std::size_t j0 = 0;
    for (std::size_t j = 1; j <= M; ++j) {
        if (std::abs(p_grid[j]) < std::abs(p_grid[j0])) j0 = j;
    }

    std::vector<std::optional<Member>> members(M + 1);
    {
        Profile w = solve_stationary(flux, p_grid[j0], grid, cfg, std::nullopt, stencil);
        Profile dp = solve_dp_w(flux, w, stencil);
        members[j0] = Member{std::move(w), std::move(dp)};
    }
    for (std::size_t j = j0 + 1; j <= M; ++j) {
        members[j] = continue_to(flux, *members[j - 1], p_grid[j - 1], p_grid[j], cfg, stencil);
    }
    for (std::size_t j = j0; j-- > 0;) {
        members[j] = continue_to(flux, *members[j + 1], p_grid[j + 1], p_grid[j], cfg, stencil);
    }

    StationaryFamily family{flux, grid, stencil, std::move(p_grid), {}, {}, {}, 0.0};
    family.alpha = std::numeric_limits<double>::infinity();
    for (auto& m : members) {
        family.residuals.push_back(max_abs(stationary_residual(flux, m->w.values(), grid, stencil)));
        family.alpha = std::min(family.alpha, m->dp.min());
        family.profiles.push_back(std::move(m->w));
        family.dp_profiles.push_back(std::move(m->dp));
    }
    check_family(family);
    return family;
}

void check_family(const StationaryFamily& family, double mean_tol, double dp_mean_tol) {
    const std::size_t count = family.size();
    if (family.profiles.size() != count || family.dp_profiles.size() != count) {
        throw InvalidInput("family: profile count does not match the p grid");
    }
    for (std::size_t j = 0; j < count; ++j) {
        std::ostringstream msg;
        if (j > 0 && !(family.p_grid[j] > family.p_grid[j - 1])) {
            msg << "family: p grid not strictly increasing at j = " << j;
            throw SolverError(msg.str());
        }
        if (std::abs(family.profiles[j].mean() - family.p_grid[j]) > mean_tol) {
            msg << "family: mean of profile " << j << " is " << family.profiles[j].mean()
                << ", expected " << family.p_grid[j];
            throw SolverError(msg.str());
        }
        if (std::abs(family.dp_profiles[j].mean() - 1.0) > dp_mean_tol) {
            msg << "family: mean of d_p w at j = " << j << " is " << family.dp_profiles[j].mean();
            throw SolverError(msg.str());
        }
        if (!(family.dp_profiles[j].min() > 0.0)) {
            msg << "family: d_p w is not positive at j = " << j;
            throw SolverError(msg.str());
        }
        if (j > 0) {
            const Profile& lo = family.profiles[j - 1];
            const Profile& hi = family.profiles[j];
            for (std::size_t i = 0; i < lo.size(); ++i) {
                if (!(lo[i] < hi[i])) {
                    msg << "family: monotonicity violated between p = " << family.p_grid[j - 1]
                        << " and p = " << family.p_grid[j] << " at cell " << i;
                    throw SolverError(msg.str());
                }
            }
        }
    }
    if (!(family.alpha > 0.0)) throw SolverError("family: alpha is not positive");
}

namespace {

std::vector<double> theta_coefficients(const FluxModel& flux, const CellGrid& grid) {
    check_profile_matches(flux, grid);
    std::vector<double> b(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.center(i);
        const double f0 = flux.eval(0.0, x);
        if (std::abs(f0) > 1e-12) {
            std::ostringstream msg;
            msg << "solve_theta: flux is not normalized, f(0, " << x << ") = " << f0
                << "; apply normalize_about_wp first";
            throw InvalidInput(msg.str());
        }
        b[i] = flux.d_u(0.0, x);
    }
    return b;
}

void require_positive(const std::vector<double>& theta, const char* who) {
    const double lo = *std::min_element(theta.begin(), theta.end());
    if (!(lo > 0.0)) {
        std::ostringstream msg;
        msg << who << ": weight is not positive (min " << lo << ")";
        throw SolverError(msg.str());
    }
}

} // namespace

Profile solve_theta_integrating_factor(const FluxModel& flux, const CellGrid& grid) {
    const std::vector<double> b = theta_coefficients(flux, grid);
    const std::size_t n = grid.size();
    const double ih = 1.0 / grid.spacing();
    // theta_i = A_i theta_0 + B_i c
    std::vector<double> A(n + 1), B(n + 1);
    A[0] = 1.0;
    B[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double denom = ih + 0.5 * b[(i + 1) % n];
        if (!(denom > 0.0) || !(ih - 0.5 * b[i] > 0.0)) {
            throw SolverError("solve_theta: grid too coarse for the drift (h |b| / 2 >= 1)");
        }
        const double r = (ih - 0.5 * b[i]) / denom;
        A[i + 1] = r * A[i];
        B[i + 1] = r * B[i] + 1.0 / denom;
    }
    double SA = 0.0, SB = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        SA += A[i];
        SB += B[i];
    }
    // (A_n - 1) theta_0 + B_n c = 0 ;  SA theta_0 + SB c = n
    const double a11 = A[n] - 1.0, a12 = B[n];
    const double det = a11 * SB - a12 * SA;
    if (det == 0.0) throw SolverError("solve_theta: degenerate periodicity system");
    const double theta0 = (0.0 * SB - a12 * static_cast<double>(n)) / det;
    const double c = (a11 * static_cast<double>(n) - 0.0 * SA) / det;
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = A[i] * theta0 + B[i] * c;
    require_positive(theta, "solve_theta_integrating_factor");
    return Profile(grid, std::move(theta));
}

Profile solve_theta(const FluxModel& flux, const CellGrid& grid) {
    const std::vector<double> b = theta_coefficients(flux, grid);
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const double ih2 = 1.0 / (h * h);
    PeriodicTridiag L(n);
    for (std::size_t i = 0; i < n; ++i) {
        L.lower[i] = ih2 - b[(i + n - 1) % n] / (2.0 * h);
        L.diag[i] = -2.0 * ih2;
        L.upper[i] = ih2 + b[(i + 1) % n] / (2.0 * h);
    }
    const std::vector<double> zero(n, 0.0);
    double mu = 0.0;
    std::vector<double> theta = bordered_solve(L, zero, 1.0, mu);
    require_positive(theta, "solve_theta");

    const Profile check = solve_theta_integrating_factor(flux, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(theta[i] - check[i]));
    if (gap > 1e-9) {
        std::ostringstream msg;
        msg << "solve_theta: bordered and integrating-factor weights disagree by " << gap;
        throw SolverError(msg.str());
    }
    return Profile(grid, std::move(theta));
}

namespace {

class NormalizedFlux final : public FluxFunction {
public:
    NormalizedFlux(FluxModel base, const Profile& w_p) : base_(std::move(base)), w_(w_p) {}

    double eval(double v, double x) const override {
        const double w = w_.value(x);
        return base_.eval(v + w, x) - base_.eval(w, x);
    }
    double d_u(double v, double x) const override { return base_.d_u(v + w_.value(x), x); }
    double d_uu(double v, double x) const override { return base_.d_uu(v + w_.value(x), x); }
    double d_x(double v, double x) const override {
        const double w = w_.value(x);
        const double dw = w_.derivative(x);
        return base_.d_x(v + w, x) + base_.d_u(v + w, x) * dw - base_.d_x(w, x) - base_.d_u(w, x) * dw;
    }
    SonicPoints sonic_points(double x) const override {
        SonicPoints s = base_.sonic_points(x);
        const double w = w_.value(x);
        for (int k = 0; k < s.count; ++k) s.at[static_cast<std::size_t>(k)] -= w;
        return s;
    }

private:
    FluxModel base_;
    PeriodicSpline w_;
};

} // namespace

FluxModel normalize_about_wp(const FluxModel& flux, const Profile& w_p) {
    check_profile_matches(flux, w_p.grid());
    for (double v : w_p.values()) {
        if (!std::isfinite(v)) throw InvalidInput("normalize_about_wp: profile has non-finite values");
    }
    return FluxModel(std::make_shared<NormalizedFlux>(flux, w_p), flux.period(),
                     "normalized(" + flux.label() + ")", flux.params());
}

double coarse_fine_distance(const Profile& coarse, const Profile& fine) {
    const std::size_t n = coarse.size();
    if (fine.size() != 2 * n) throw InvalidInput("coarse_fine_distance: fine grid must have 2n cells");
    const std::size_t m = fine.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = 2 * i;
        const double interp = (-fine[(k + m - 1) % m] + 9.0 * fine[k] + 9.0 * fine[k + 1] -
                               fine[(k + 2) % m]) / 16.0;
        d = std::max(d, std::abs(coarse[i] - interp));
    }
    return d;
}

double grid_refinement_order(const FluxModel& flux, double p, std::size_t n, const NewtonConfig& cfg) {
    const double T = flux.period();
    const Profile w1 = solve_stationary(flux, p, CellGrid(n, T), cfg);
    const Profile w2 = solve_stationary(flux, p, CellGrid(2 * n, T), cfg);
    const Profile w4 = solve_stationary(flux, p, CellGrid(4 * n, T), cfg);
    const double e1 = coarse_fine_distance(w1, w2);
    const double e2 = coarse_fine_distance(w2, w4);
    if (e2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(e1 / e2);
}

} // namespace perstab
