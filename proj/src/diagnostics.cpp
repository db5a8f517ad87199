#include "perstab/diagnostics.hpp"

#include "perstab/errors.hpp"
#include "perstab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perstab {

double LapConfig::resolve(std::span<const double> samples) const {
    if (hysteresis) {
        if (!(*hysteresis >= 0.0)) throw InvalidInput("LapConfig: hysteresis must be >= 0");
        return *hysteresis;
    }
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return 10.0 * std::numeric_limits<double>::epsilon() * m;
}

int lap_number(std::span<const double> samples, const LapConfig& cfg) {
    if (samples.size() < 3) throw InvalidInput("lap_number: need at least 3 samples");
    const double eps = cfg.resolve(samples);
    // dir: 0 undecided, +1 rising, -1 falling; ext is the running extreme of the current lap
    int dir = 0;
    int laps = 0;
    double lo = samples[0], hi = samples[0], ext = samples[0];
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double v = samples[i];
        if (dir == 0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (v - lo > eps) {
                dir = 1;
                ext = v;
            } else if (hi - v > eps) {
                dir = -1;
                ext = v;
            }
        } else if (dir == 1) {
            if (v > ext) ext = v;
            else if (ext - v > eps) {
                ++laps;
                dir = -1;
                ext = v;
            }
        } else {
            if (v < ext) ext = v;
            else if (v - ext > eps) {
                ++laps;
                dir = 1;
                ext = v;
            }
        }
    }
    return laps;
}

int sign_changes(std::span<const double> samples, const LapConfig& cfg) {
    if (samples.empty()) throw InvalidInput("sign_changes: need at least one sample");
    const double eps = cfg.resolve(samples);
    int last = 0, count = 0;
    for (double v : samples) {
        const int s = v > eps ? 1 : (v < -eps ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

double weighted_energy(std::span<const double> theta, std::span<const double> V, double h) {
    if (theta.size() != V.size()) throw InvalidInput("weighted_energy: size mismatch");
    if (!(h > 0.0)) throw InvalidInput("weighted_energy: h must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (!(theta[i] > 0.0)) throw InvalidInput("weighted_energy: theta must be positive");
        s += theta[i] * V[i] * V[i];
    }
    return s * h;
}

L1BoundReport l1_bound_check(const State& state, std::span<const double> V, int laps) {
    if (V.size() != state.u().size()) throw InvalidInput("l1_bound_check: size mismatch");
    if (laps < 0) throw InvalidInput("l1_bound_check: lap number must be >= 0");
    L1BoundReport r;
    r.laps = laps;
    r.lhs = norm(state.perturbation(), state.grid().spacing(), NormKind::L1);
    r.rhs = 2.0 * (laps + 1) * norm(V, 1.0, NormKind::Linf);
    r.passed = r.lhs <= r.rhs + 1e-9;
    return r;
}

void fill_entropy_columns(const EntropyField& e, const State& s, double p_ref,
                          DiagnosticsRow& row) {
    row.total_eta = e.total_eta;
    row.dissipation = e.dissipation;
    row.l1_pi = e.l1_pi;
    std::vector<double> pi = e.pi;
    for (double& v : pi) v -= p_ref;
    try {
        row.nash_ratio =
            nash_ratio(pi, s.grid().spacing(), s.grid().boundary() == BoundaryMode::periodic);
    } catch (const AlreadyConverged&) {
        row.nash_ratio = DiagnosticsRow::kUnset;
    }
}

Observer diagnostics_observer(DiagnosticsContext ctx) {
    return [ctx = std::move(ctx)](const State& s, DiagnosticsRow& row) {
        const double h = s.grid().spacing();
        const std::vector<double> d = s.perturbation();
        const std::vector<double> V = primitive(d, h);
        row.l1_dist = norm(d, h, NormKind::L1);
        row.l2_dist = norm(d, h, NormKind::L2);
        row.linf_V = norm(V, h, NormKind::Linf);
        row.l2_V = norm(V, h, NormKind::L2);
        LapConfig lap_cfg = ctx.lap, sign_cfg = ctx.lap;
        if (!ctx.lap.hysteresis) {
            // u - background carries rounding of order eps |u|; V sums it over the line
            double umax = 0.0;
            for (double v : s.u()) umax = std::max(umax, std::abs(v));
            const double eps = std::numeric_limits<double>::epsilon();
            sign_cfg.hysteresis = std::max(sign_cfg.resolve(d), 10.0 * eps * umax);
            lap_cfg.hysteresis = std::max(lap_cfg.resolve(V), 10.0 * eps * umax * s.grid().length());
        }
        row.lap_number = lap_number(V, lap_cfg);
        row.sign_changes = sign_changes(d, sign_cfg);
        row.mass_offset = s.perturbation_mass() - ctx.initial_mass;
        if (ctx.theta) row.weighted_energy = weighted_energy(*ctx.theta, V, h);
        if (ctx.entropy) {
            fill_entropy_columns(eta_field(*ctx.entropy, s, ctx.p_ref), s, ctx.p_ref, row);
        }
    };
}

} // namespace perstab
