#include "doctest.h"

#include "perstab/errors.hpp"
#include "perstab/flux.hpp"
#include "perstab/grid.hpp"
#include "perstab/norms.hpp"
#include "perstab/periodic_spline.hpp"
#include "perstab/tridiagonal.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace perstab;

namespace {

// Dense Gaussian elimination with partial pivoting, used as the reference solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        }
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

std::vector<FluxModel> all_builtins() {
    return {
        builtin_flux("constant_flux_burgers"),
        builtin_flux("forced_burgers", {{"A", 0.5}, {"T", 1.0}}),
        builtin_flux("forced_burgers", {{"A", -1.3}, {"T", 2.5}}),
        builtin_flux("periodic_advection", {{"a0", 1.0}, {"A", 0.5}, {"T", 1.0}}),
        builtin_flux("custom_table",
                     {{"T", 1.5}, {"u1", 0.4}, {"u2", 0.5}, {"u3", 0.1}, {"u1_sin1", 0.3}, {"u0_cos2", 0.2}}),
    };
}

} // namespace

TEST_CASE("norm examples") {
    const std::vector<double> zeros{0, 0, 0};
    CHECK(norm(zeros, 0.1, NormKind::L1) == 0.0);
    const std::vector<double> ones{1, 1, 1, 1};
    CHECK(norm(ones, 0.25, NormKind::L1) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> tri{3, 4};
    CHECK(norm(tri, 1.0, NormKind::L2) == doctest::Approx(5.0).epsilon(1e-15));
    const std::vector<double> mixed{-7, 2};
    CHECK(norm(mixed, 1.0, NormKind::Linf) == 7.0);
}

TEST_CASE("norm rejects empty input and bad spacing") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(norm(empty, 0.1, NormKind::L1), InvalidInput);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(norm(one, 0.0, NormKind::L2), InvalidInput);
}

TEST_CASE("midpoint quadrature of one over a cell grid is the period") {
    for (std::size_t n : {8u, 100u, 1000u, 4096u}) {
        for (double T : {1.0, 0.3, 7.25}) {
            const CellGrid grid(n, T);
            const std::vector<double> one(n, 1.0);
            CHECK(std::abs(norm(one, grid.spacing(), NormKind::L1) - T) <= 1e-13 * T);
        }
    }
}

TEST_CASE("primitive examples") {
    const double h = 0.1;
    const std::vector<double> zero(20, 0.0);
    for (double v : primitive(zero, h)) CHECK(v == 0.0);

    std::vector<double> ind(20, 0.0);
    for (int i = 5; i < 12; ++i) ind[i] = 1.0;
    CHECK(primitive(ind, h).back() == doctest::Approx(7 * h).epsilon(1e-15));

    std::vector<double> dip(64, 0.0);
    for (int i = 0; i < 64; ++i) {
        const double x = (i + 0.5) * h - 3.2;
        dip[i] = std::exp(-(x + 1) * (x + 1) * 4) - std::exp(-(x - 1) * (x - 1) * 4);
    }
    CHECK(std::abs(primitive(dip, h).back()) <= 1e-12);
}

TEST_CASE("forward difference of the primitive recovers the data") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double h = 0.01 + 0.1 * std::abs(U(rng));
        std::vector<double> u(200);
        for (double& v : u) v = U(rng);
        const auto V = primitive(u, h);
        CHECK(std::abs(V[0] / h - u[0]) <= 1e-12);
        for (std::size_t i = 1; i < u.size(); ++i) {
            CHECK(std::abs((V[i] - V[i - 1]) / h - u[i]) <= 1e-12);
        }
    }
}

TEST_CASE("builtin flux examples") {
    const FluxModel burgers = builtin_flux("constant_flux_burgers");
    for (double x : {0.0, 0.3, 1.7}) CHECK(burgers.d_x(1.3, x) == 0.0);

    const FluxModel forced = builtin_flux("forced_burgers", {{"A", 0.5}, {"T", 1.0}});
    CHECK(forced.eval(2.0, 0.25) == doctest::Approx(3.0).epsilon(1e-14));

    const FluxModel adv = builtin_flux("periodic_advection", {{"a0", 1.0}, {"A", 0.5}, {"T", 1.0}});
    for (double u : {-3.0, 0.0, 0.7, 12.0}) CHECK(adv.d_u(u, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("builtin flux rejects bad labels and parameters") {
    CHECK_THROWS_AS(builtin_flux("no_such_flux"), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("forced_burgers", {{"T", -1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("forced_burgers", {{"B", 1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("periodic_advection", {{"A", 1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("periodic_advection", {{"a0", -1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("custom_table", {{"u4", 1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin_flux("custom_table", {{"u1_cos9", 1.0}}), InvalidInput);
}

TEST_CASE("builtin fluxes are periodic and have consistent derivatives (randomised)") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> Uu(-3.0, 3.0);
    std::uniform_real_distribution<double> Ux(-10.0, 10.0);
    const double d = 1e-5;
    for (const FluxModel& f : all_builtins()) {
        CAPTURE(f.label());
        for (int k = 0; k < 1000; ++k) {
            const double u = Uu(rng);
            const double x = Ux(rng);
            const double fv = f.eval(u, x);
            CHECK(std::abs(f.eval(u, x + f.period()) - fv) <= 1e-12 * (1.0 + std::abs(fv)));

            const double fd_u = (f.eval(u + d, x) - f.eval(u - d, x)) / (2 * d);
            const double fd_uu = (f.d_u(u + d, x) - f.d_u(u - d, x)) / (2 * d);
            const double fd_x = (f.eval(u, x + d) - f.eval(u, x - d)) / (2 * d);
            CHECK(std::abs(f.d_u(u, x) - fd_u) <= 1e-5 * std::max(1.0, std::abs(fd_u)));
            CHECK(std::abs(f.d_uu(u, x) - fd_uu) <= 1e-5 * std::max(1.0, std::abs(fd_uu)));
            CHECK(std::abs(f.d_x(u, x) - fd_x) <= 1e-5 * std::max(1.0, std::abs(fd_x)));
        }
    }
}

TEST_CASE("sonic points are roots of d_u f") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> Ux(0.0, 3.0);
    for (const FluxModel& f : all_builtins()) {
        for (int k = 0; k < 200; ++k) {
            const double x = Ux(rng);
            const SonicPoints s = f.sonic_points(x);
            for (int j = 0; j < s.count; ++j) CHECK(std::abs(f.d_u(s.at[j], x)) <= 1e-12);
            for (int j = 1; j < s.count; ++j) CHECK(s.at[j - 1] <= s.at[j]);
        }
    }
}

TEST_CASE("Engquist-Osher flux: consistency, monotonicity and quadrature oracle") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const FluxModel& f : all_builtins()) {
        CAPTURE(f.label());
        for (int k = 0; k < 300; ++k) {
            const double a = U(rng), b = U(rng), x = U(rng);
            CHECK(engquist_osher(f, a, a, x) == doctest::Approx(f.eval(a, x)).epsilon(1e-14));
            // Oracle: composite Simpson of max(d_u f, 0) on a fine grid.
            const int m = 4000;
            double integral = 0.0;
            for (int j = 0; j < m; ++j) {
                const double s0 = b + (a - b) * j / m, s1 = b + (a - b) * (j + 1) / m;
                const double sm = 0.5 * (s0 + s1);
                integral += (s1 - s0) / 6.0 *
                            (std::max(f.d_u(s0, x), 0.0) + 4 * std::max(f.d_u(sm, x), 0.0) +
                             std::max(f.d_u(s1, x), 0.0));
            }
            CHECK(engquist_osher(f, a, b, x) == doctest::Approx(f.eval(b, x) + integral).epsilon(1e-6));
            // Nondecreasing in the left state, nonincreasing in the right state.
            const double da = 1e-3;
            CHECK(engquist_osher(f, a + da, b, x) >= engquist_osher(f, a, b, x) - 1e-14);
            CHECK(engquist_osher(f, a, b + da, x) <= engquist_osher(f, a, b, x) + 1e-14);
        }
    }
}

TEST_CASE("reversed flux negates values and keeps sonic points") {
    const FluxModel f = builtin_flux("forced_burgers");
    const FluxModel g = reversed_flux(f);
    CHECK(g.eval(0.7, 0.2) == -f.eval(0.7, 0.2));
    CHECK(g.d_u(0.7, 0.2) == -f.d_u(0.7, 0.2));
    CHECK(g.sonic_points(0.2).at[0] == f.sonic_points(0.2).at[0]);
}

TEST_CASE("tridiagonal solvers agree with dense elimination") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (std::size_t n : {3u, 4u, 7u, 33u}) {
        std::vector<double> a(n), b(n), c(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = U(rng);
            c[i] = U(rng);
            b[i] = 3.0 + U(rng);
            d[i] = U(rng);
        }
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            A[i][i] = b[i];
            if (i > 0) A[i][i - 1] = a[i];
            if (i + 1 < n) A[i][i + 1] = c[i];
        }
        const auto x = solve_tridiagonal(a, b, c, d);
        const auto xr = dense_solve(A, d);
        for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xr[i]).epsilon(1e-12));

        A[0][n - 1] += a[0];
        A[n - 1][0] += c[n - 1];
        const auto y = solve_cyclic_tridiagonal(a, b, c, d);
        const auto yr = dense_solve(A, d);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(yr[i]).epsilon(1e-12));
    }
}

TEST_CASE("tridiagonal solver reports a zero pivot") {
    const std::vector<double> a{0, 1}, b{0, 1}, c{1, 0}, d{1, 1};
    CHECK_THROWS_AS(solve_tridiagonal(a, b, c, d), SolverError);
}

TEST_CASE("periodic spline interpolates nodes and resolves a sine") {
    const CellGrid grid(64, 2.0);
    std::vector<double> v(64);
    const double k = std::numbers::pi; // one wave per period 2
    for (std::size_t i = 0; i < 64; ++i) v[i] = std::sin(k * grid.center(i));
    const PeriodicSpline s(Profile(grid, v));
    for (std::size_t i = 0; i < 64; ++i) CHECK(s.value(grid.center(i)) == doctest::Approx(v[i]).epsilon(1e-13));
    for (double x : {-3.1, -0.01, 0.0, 0.37, 1.99, 2.0, 5.5}) {
        CHECK(std::abs(s.value(x) - std::sin(k * x)) < 1e-6);
        CHECK(std::abs(s.derivative(x) - k * std::cos(k * x)) < 1e-4);
    }
}

TEST_CASE("adaptive Simpson and least squares") {
    auto g = [](double x) { return std::exp(-x * x); };
    CHECK(adaptive_simpson(g, -5, 5, 1e-12) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
    CHECK(adaptive_simpson(g, 1, -1, 1e-12) == doctest::Approx(-std::sqrt(std::numbers::pi) * std::erf(1.0)).epsilon(1e-10));

    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const LinearFit fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("grids and profiles") {
    CHECK_THROWS_AS(CellGrid(7, 1.0), InvalidInput);
    CHECK_THROWS_AS(CellGrid(16, 0.0), InvalidInput);
    const CellGrid cell(16, 1.0);
    CHECK_THROWS_AS(LineGrid(cell, 4, BoundaryMode::periodic, 0.5), InvalidInput);
    const LineGrid line = LineGrid::centered(cell, 64, BoundaryMode::pinned_to_wp);
    CHECK(line.origin() == -32.0);
    CHECK(line.size() == 1024);
    CHECK(line.center(0) == doctest::Approx(-32.0 + 1.0 / 32.0));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    std::vector<double> v(16);
    double sum = 0.0;
    for (double& x : v) sum += (x = U(rng));
    const Profile prof(cell, v);
    CHECK(std::abs(prof.mean() - sum / 16) <= 1e-13 * std::max(1.0, std::abs(prof.mean())));
    const auto tiled = prof.tile(LineGrid(cell, 3, BoundaryMode::periodic));
    CHECK(tiled.size() == 48);
    CHECK(tiled[33] == v[1]);
}
