#include "doctest.h"

#include "perstab/diagnostics.hpp"
#include "perstab/errors.hpp"
#include "perstab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace perstab;

namespace {

constexpr double kPi = std::numbers::pi;

// Count of strict reversals straight from the definition: indices where
// consecutive nonzero differences change sign.
int brute_force_laps(const std::vector<double>& g) {
    int laps = 0, last = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double d = g[i] - g[i - 1];
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++laps;
        last = s;
    }
    return laps;
}

} // namespace

TEST_CASE("lap number examples") {
    std::vector<double> inc(50);
    for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = 0.1 * i * i;
    CHECK(lap_number(inc) == 0);
    CHECK(lap_number(std::vector<double>(20, 3.0)) == 0);

    // two full periods starting at a crest: four monotone laps
    std::vector<double> s(400);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(kPi / 2 + 4 * kPi * (i + 0.5) / s.size());
    CHECK(brute_force_laps(s) == 3);
    CHECK(lap_number(s) == 3);
    // starting at a zero there is an extra half lap at each end
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(4 * kPi * (i + 0.5) / s.size());
    CHECK(lap_number(s) == brute_force_laps(s));
    CHECK(lap_number(s) == 4);

    CHECK_THROWS_AS(lap_number(std::vector<double>{1.0, 2.0}), InvalidInput);
}

TEST_CASE("lap number ignores ripple below the hysteresis") {
    std::vector<double> v(100);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 * (i / 10) + ((i % 2) ? 1e-13 : -1e-13);
    CHECK(brute_force_laps(v) > 10);
    CHECK(lap_number(v, {1e-12}) == 0);
    // a genuine excursion is still counted
    v[50] += 1.0;
    CHECK(lap_number(v, {1e-12}) == 2);
}

TEST_CASE("lap number agrees with the brute-force count on random walks") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> g(3 + rng() % 40);
        double x = 0.0;
        for (double& v : g) v = (x += N(rng));
        CHECK(lap_number(g, {0.0}) == brute_force_laps(g));
    }
}

TEST_CASE("sign changes") {
    CHECK(sign_changes(std::vector<double>{1.0, 2.0, 0.5}) == 0);
    CHECK(sign_changes(std::vector<double>{1.0, -1.0, 1.0}) == 2);
    CHECK(sign_changes(std::vector<double>{1.0, 1e-15, -1e-15, 2.0}, {1e-12}) == 0);
    CHECK(sign_changes(std::vector<double>{1.0, 0.0, 0.0, -2.0}) == 1);
    CHECK(sign_changes(std::vector<double>{-0.5}) == 0);
}

TEST_CASE("weighted energy") {
    const std::vector<double> V{0.5, -1.0, 2.0, 0.0};
    CHECK(weighted_energy(std::vector<double>(4, 1.0), std::vector<double>(4, 0.0), 0.1) == 0.0);
    const double l2 = norm(V, 0.1, NormKind::L2);
    CHECK(weighted_energy(std::vector<double>(4, 1.0), V, 0.1) == doctest::Approx(l2 * l2));
    CHECK_THROWS_AS(weighted_energy(std::vector<double>{1.0, 0.0, 1.0, 1.0}, V, 0.1), InvalidInput);
}

TEST_CASE("l1 bound examples") {
    const CellGrid cell(16, 1.0);
    const LineGrid line = LineGrid::centered(cell, 8, BoundaryMode::pinned_to_wp);
    const Profile bg = Profile::constant(cell, 0.25);
    const double h = line.spacing();

    const State flat = State::perturbed(line, bg, std::vector<double>(line.size(), 0.0));
    const std::vector<double> V0 = primitive(flat.perturbation(), h);
    const L1BoundReport r0 = l1_bound_check(flat, V0, lap_number(V0));
    CHECK(r0.lhs == 0.0);
    CHECK(r0.rhs == 0.0);
    CHECK(r0.passed);

    std::vector<double> bump(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) bump[i] = std::exp(-line.center(i) * line.center(i));
    const State one = State::perturbed(line, bg, bump);
    const std::vector<double> V1 = primitive(one.perturbation(), h);
    const int m = lap_number(V1);
    CHECK(m == 0); // V of a one-signed bump is monotone
    const L1BoundReport r1 = l1_bound_check(one, V1, m);
    CHECK(r1.lhs == doctest::Approx(norm(V1, h, NormKind::Linf)).epsilon(1e-12));
    CHECK(r1.passed);
}

TEST_CASE("l1 bound on random zero-mean piecewise data") {
    const CellGrid cell(16, 1.0);
    const LineGrid line = LineGrid::centered(cell, 8, BoundaryMode::pinned_to_wp);
    const Profile bg = Profile::constant(cell, 0.0);
    const double h = line.spacing();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> b(line.size(), 0.0);
        const std::size_t pieces = 2 + rng() % 8;
        const std::size_t len = line.size() / 2 / pieces;
        for (std::size_t k = 0; k < pieces; ++k) {
            const double v = U(rng);
            for (std::size_t i = 0; i < len; ++i) b[line.size() / 4 + k * len + i] = v;
        }
        double mean = 0.0;
        for (std::size_t i = line.size() / 4; i < line.size() / 4 + pieces * len; ++i) mean += b[i];
        mean /= static_cast<double>(pieces * len);
        for (std::size_t i = line.size() / 4; i < line.size() / 4 + pieces * len; ++i) b[i] -= mean;

        const State s = State::perturbed(line, bg, b);
        const std::vector<double> V = primitive(s.perturbation(), h);
        // both sides by direct evaluation
        double lhs = 0.0, vmax = 0.0;
        for (double x : b) lhs += std::abs(x) * h;
        for (double x : V) vmax = std::max(vmax, std::abs(x));
        const int m = lap_number(V);
        const L1BoundReport r = l1_bound_check(s, V, m);
        CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
        CHECK(r.rhs == doctest::Approx(2.0 * (m + 1) * vmax).epsilon(1e-12));
        CHECK(lhs <= 2.0 * (m + 1) * vmax + 1e-9);
        CHECK(r.passed);
    }
}

TEST_CASE("observer along a forced Burgers run") {
    const FluxModel f = builtin_flux("forced_burgers");
    const CellGrid cell(32, 1.0);
    const Profile bg = discrete_background(f, 0.0, cell);
    const LineGrid line = LineGrid::centered(cell, 32, BoundaryMode::pinned_to_wp);
    const FluxModel g = normalize_about_wp(f, bg);
    const Profile theta = solve_theta(g, cell);

    std::vector<double> b(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        const double x = line.center(i);
        b[i] = 0.3 * (std::exp(-(x + 1.5) * (x + 1.5) * 4) - std::exp(-(x - 1.5) * (x - 1.5) * 4)) +
               0.1 * std::exp(-x * x * 16) - 0.1 * std::exp(-(x - 0.5) * (x - 0.5) * 16);
    }
    const State s = State::perturbed(line, bg, b);
    DiagnosticsContext ctx;
    ctx.initial_mass = s.perturbation_mass();
    ctx.theta = theta.tile(line);
    std::vector<double> snaps;
    for (int k = 0; k <= 40; ++k) snaps.push_back(0.1 * k);
    const EvolveResult r = evolve(s, f, 4.0, {0.9, 0.05}, snaps, {diagnostics_observer(ctx)});
    const DiagnosticsSeries& d = r.series;
    REQUIRE(d.size() == 41);
    for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(d.sign_changes[k] <= d.lap_number[k] + 1);
        CHECK(d.l1_dist[k] <= 2.0 * (d.lap_number[k] + 1) * d.linf_V[k] + 1e-9);
        if (k > 0) {
            CHECK(d.lap_number[k] <= d.lap_number[k - 1]);
            CHECK(d.weighted_energy[k] <= d.weighted_energy[k - 1] + 1e-9);
            CHECK(d.l1_dist[k] <= d.l1_dist[k - 1] + 1e-12);
        }
        // leakage through the pinned ends stays negligible on this domain
        CHECK(std::abs(d.mass_offset[k]) <= 1e-8 * d.l1_dist.front());
        CHECK(std::isnan(d.total_eta[k]));
    }
    CHECK(d.lap_number.front() >= 1);
}
