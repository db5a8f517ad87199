#include "perstab/evolution.hpp"

#include "perstab/errors.hpp"
#include "perstab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace perstab {

State::State(LineGrid grid, std::vector<double> u, double time, Profile background)
    : grid_(std::move(grid)), u_(std::move(u)), time_(time), background_(std::move(background)) {
    if (u_.size() != grid_.size()) {
        throw InvalidInput("State: u has " + std::to_string(u_.size()) + " entries, grid has " +
                           std::to_string(grid_.size()));
    }
    if (!(background_.grid() == grid_.cell())) {
        throw InvalidInput("State: background is not sampled on the line's cell grid");
    }
    if (!(time_ >= 0.0)) throw InvalidInput("State: time must be >= 0");
}

State State::perturbed(LineGrid grid, Profile background, std::span<const double> perturbation,
                       double time) {
    if (perturbation.size() != grid.size()) {
        throw InvalidInput("State::perturbed: perturbation length does not match the grid");
    }
    std::vector<double> u = background.tile(grid);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += perturbation[i];
    return State(std::move(grid), std::move(u), time, std::move(background));
}

std::vector<double> State::perturbation() const {
    std::vector<double> d(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) d[i] = u_[i] - background_at(i);
    return d;
}

double State::perturbation_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) s += u_[i] - background_at(i);
    return s * grid_.spacing();
}

void StepPolicy::validate() const {
    if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0)) {
        throw InvalidInput("StepPolicy: cfl_fraction must lie in (0, 1]");
    }
    if (!(dt_max > 0.0)) throw InvalidInput("StepPolicy: dt_max must be positive");
}

namespace {

// Local (within-period) position of interface i + 1/2, i in [-1, N-1].
double local_interface(const LineGrid& g, std::ptrdiff_t i) {
    const auto n = static_cast<std::ptrdiff_t>(g.cell().size());
    const std::ptrdiff_t k = ((i % n) + n) % n;
    return g.cell().interface(static_cast<std::size_t>(k));
}

double local_center(const LineGrid& g, std::size_t i) {
    return g.cell().center(g.cell_index(i));
}

} // namespace

double cfl_limit(const State& state, const FluxModel& flux) {
    const LineGrid& g = state.grid();
    const auto u = state.u();
    double cmax = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        const double right = flux.d_u(u[i], local_interface(g, ii));
        const double left = flux.d_u(u[i], local_interface(g, ii - 1));
        cmax = std::max(cmax, std::max(right, 0.0) - std::min(left, 0.0));
    }
    if (cmax == 0.0) return std::numeric_limits<double>::infinity();
    return g.spacing() / cmax;
}

double stable_dt(const State& state, const FluxModel& flux, const StepPolicy& policy) {
    policy.validate();
    return std::min(policy.dt_max, policy.cfl_fraction * cfl_limit(state, flux));
}

State step(const State& state, const FluxModel& flux, double dt) {
    if (!(dt > 0.0)) throw InvalidInput("step: dt must be positive");
    const double limit = cfl_limit(state, flux);
    if (dt > limit * (1.0 + 1e-12)) {
        throw CflViolation("step: dt = " + format_real(dt) + " exceeds the monotonicity bound " +
                           format_real(limit));
    }
    const LineGrid& g = state.grid();
    const std::size_t n = g.size();
    const double h = g.spacing();
    const auto u = state.u();
    const bool periodic = g.boundary() == BoundaryMode::periodic;

    const double ghost_left = periodic ? u[n - 1] : state.background()[g.cell().size() - 1];
    const double ghost_right = periodic ? u[0] : state.background()[0];
    auto value = [&](std::ptrdiff_t i) {
        if (i < 0) return ghost_left;
        if (i >= static_cast<std::ptrdiff_t>(n)) return ghost_right;
        return u[static_cast<std::size_t>(i)];
    };

    // F[i + 1] is the flux through interface i + 1/2, i = -1 .. n-1.
    std::vector<double> F(n + 1);
    for (std::ptrdiff_t i = -1; i < static_cast<std::ptrdiff_t>(n); ++i) {
        F[static_cast<std::size_t>(i + 1)] =
            engquist_osher(flux, value(i), value(i + 1), local_interface(g, i));
    }
    if (periodic) F[0] = F[n];

    std::vector<double> rhs(n);
    const double lam = dt / h;
    for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - lam * (F[i + 1] - F[i]);

    const double r = dt / (h * h);
    std::vector<double> a(n, -r), b(n, 1.0 + 2.0 * r), c(n, -r);
    std::vector<double> next;
    if (periodic) {
        next = solve_cyclic_tridiagonal(a, b, c, rhs);
    } else {
        rhs[0] += r * ghost_left;
        rhs[n - 1] += r * ghost_right;
        next = solve_tridiagonal(a, b, c, rhs);
    }
    return State(g, std::move(next), state.time() + dt, state.background());
}

Profile discrete_background(const FluxModel& flux, double p, const CellGrid& grid,
                            const NewtonConfig& cfg) {
    return solve_stationary(flux, p, grid, cfg, std::nullopt, CellStencil::engquist_osher);
}

EvolveResult evolve(const State& state, const FluxModel& flux, double t_end,
                    const StepPolicy& policy, std::span<const double> snapshot_times,
                    const std::vector<Observer>& observers) {
    policy.validate();
    const double t0 = state.time();
    if (!(t_end >= t0)) throw InvalidInput("evolve: t_end precedes the state time");
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
        const double s = snapshot_times[k];
        if (s < t0 || s > t_end) throw InvalidInput("evolve: snapshot time outside [t0, t_end]");
        if (k > 0 && !(s > snapshot_times[k - 1])) {
            throw InvalidInput("evolve: snapshot times must increase strictly");
        }
    }

    EvolveResult result{state, {}, 0};
    auto observe = [&](const State& s) {
        DiagnosticsRow row;
        row.time = s.time();
        for (const Observer& obs : observers) obs(s, row);
        result.series.append(row);
    };

    std::size_t next_snap = 0;
    while (next_snap < snapshot_times.size() && snapshot_times[next_snap] == t0) {
        observe(result.state);
        ++next_snap;
    }
    State& cur = result.state;
    while (cur.time() < t_end) {
        const double target = next_snap < snapshot_times.size() ? snapshot_times[next_snap] : t_end;
        double dt = stable_dt(cur, flux, policy);
        const double remaining = target - cur.time();
        const bool lands = remaining <= dt;
        if (lands) dt = remaining;
        else if (remaining < 2.0 * dt) dt = 0.5 * remaining; // no sliver steps
        cur = step(cur, flux, dt);
        ++result.steps;
        if (lands) {
            cur.set_time(target);
            if (next_snap < snapshot_times.size() && target == snapshot_times[next_snap]) {
                observe(cur);
                ++next_snap;
            }
        }
    }
    return result;
}

namespace {

// Nonzero entries of the wrapped, renormalised kernel as (offset, weight*h).
struct SampledKernel {
    std::vector<std::size_t> offset;
    std::vector<double> weight;
};

SampledKernel heat_kernel(const LineGrid& grid, double tau) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const double L = grid.length();
    SampledKernel k;
    if (tau == 0.0) {
        k.offset.push_back(0);
        k.weight.push_back(1.0);
        return k;
    }
    // exp(-x^2 / (4 tau)) < 1e-40 beyond this radius
    const double radius = std::sqrt(4.0 * tau * 40.0 * std::log(10.0));
    const int images = static_cast<int>(std::ceil(radius / L)) + 1;
    const double pref = 1.0 / std::sqrt(4.0 * std::numbers::pi * tau);
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = -images; m <= images; ++m) {
            const double x = static_cast<double>(j) * h + m * L;
            if (std::abs(x) <= radius) s += pref * std::exp(-x * x / (4.0 * tau));
        }
        w[j] = s;
        total += s * h;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (w[j] != 0.0) {
            k.offset.push_back(j);
            k.weight.push_back(w[j] * h / total);
        }
    }
    return k;
}

std::vector<double> convolve(const SampledKernel& k, std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t q = 0; q < k.offset.size(); ++q) {
        const std::size_t j = k.offset[q];
        const double c = k.weight[q];
        const double* src = v.data();
        for (std::size_t i = 0; i < j; ++i) out[i] += c * src[i + n - j];
        for (std::size_t i = j; i < n; ++i) out[i] += c * src[i - j];
    }
    return out;
}

std::vector<double> flux_divergence(const LineGrid& g, const FluxModel& flux,
                                    std::span<const double> u) {
    const std::size_t n = u.size();
    std::vector<double> f(n), d(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = flux.eval(u[i], local_center(g, i));
    const double inv = 1.0 / (2.0 * g.spacing());
    for (std::size_t i = 0; i < n; ++i) d[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) * inv;
    return d;
}

} // namespace

std::vector<double> heat_convolve(std::span<const double> v, const LineGrid& grid, double tau) {
    if (v.size() != grid.size()) throw InvalidInput("heat_convolve: size mismatch");
    if (!(tau >= 0.0)) throw InvalidInput("heat_convolve: tau must be >= 0");
    return convolve(heat_kernel(grid, tau), v);
}

State duhamel_picard(const State& u0, const FluxModel& flux, double t, int iterations,
                     int time_subintervals) {
    const LineGrid& g = u0.grid();
    if (g.boundary() != BoundaryMode::periodic) {
        throw InvalidInput("duhamel_picard: requires a periodic line (circular convolution)");
    }
    if (!(t > 0.0)) throw InvalidInput("duhamel_picard: t must be positive");
    if (iterations < 1) throw InvalidInput("duhamel_picard: iterations must be >= 1");
    if (time_subintervals < 32) throw InvalidInput("duhamel_picard: need >= 32 subintervals");

    const auto m = static_cast<std::size_t>(time_subintervals);
    const double ds = t / static_cast<double>(m);
    const std::vector<double> init(u0.u().begin(), u0.u().end());
    double u0_sup = 0.0;
    for (double v : init) u0_sup = std::max(u0_sup, std::abs(v));
    const double ball = 2.0 * u0_sup;

    // free[j] = K^{s_j} * u0; kernels[k] = K at tau = (k - 1/2) ds, k = 1..m
    std::vector<std::vector<double>> free(m + 1);
    std::vector<SampledKernel> kernels(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        free[j] = convolve(heat_kernel(g, static_cast<double>(j) * ds), init);
        if (j > 0) kernels[j] = heat_kernel(g, (static_cast<double>(j) - 0.5) * ds);
    }

    std::vector<std::vector<double>> U(m + 1, init);
    const std::size_t n = init.size();
    for (int it = 0; it < iterations; ++it) {
        std::vector<std::vector<double>> G(m);
        for (std::size_t l = 0; l < m; ++l) {
            std::vector<double> mid(n);
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (U[l][i] + U[l + 1][i]);
            G[l] = flux_divergence(g, flux, mid);
        }
        std::vector<std::vector<double>> next(m + 1);
        next[0] = init;
        double change = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            next[j] = free[j];
            for (std::size_t l = 0; l < j; ++l) {
                const std::vector<double> conv = convolve(kernels[j - l], G[l]);
                for (std::size_t i = 0; i < n; ++i) next[j][i] -= ds * conv[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!(std::abs(next[j][i]) <= ball)) {
                    throw SolverError("duhamel_picard: iterate " + std::to_string(it + 1) +
                                      " left the ball of radius 2|u0|_inf at s = " +
                                      format_real(static_cast<double>(j) * ds) +
                                      "; reduce t");
                }
                change = std::max(change, std::abs(next[j][i] - U[j][i]));
            }
        }
        U = std::move(next);
        if (change <= 4.0 * std::numeric_limits<double>::epsilon() * ball) break;
    }
    return State(g, std::move(U[m]), u0.time() + t, u0.background());
}

} // namespace perstab
