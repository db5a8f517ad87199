#include "perstab/norms.hpp"

#include "perstab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace perstab {

double norm(std::span<const double> values, double h, NormKind kind) {
    if (values.empty()) throw InvalidInput("norm: empty array");
    if (!(h > 0.0)) throw InvalidInput("norm: grid spacing must be positive");
    switch (kind) {
    case NormKind::L1: {
        double s = 0.0;
        for (double v : values) s += std::abs(v);
        return h * s;
    }
    case NormKind::L2: {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(h * s);
    }
    case NormKind::Linf: {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    }
    return 0.0;
}

std::vector<double> primitive(std::span<const double> u, double h) {
    if (u.empty()) throw InvalidInput("primitive: empty array");
    if (!(h > 0.0)) throw InvalidInput("primitive: grid spacing must be positive");
    std::vector<double> V(u.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i];
        V[i] = h * acc;
    }
    return V;
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInput("difference: size mismatch");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

namespace {

struct SimpsonPanel {
    double a, b, fa, fm, fb, whole;
};

double simpson_recurse(const std::function<double(double)>& f, const SimpsonPanel& p,
                       double tol, int depth) {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           simpson_recurse(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -adaptive_simpson(f, b, a, rel_tol, abs_tol, max_depth);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Scale the tolerance by a coarse magnitude estimate of the integral.
    const double scale = (b - a) * (std::abs(fa) + 4.0 * std::abs(fm) + std::abs(fb)) / 6.0;
    const double tol = std::max(rel_tol * scale, abs_tol);
    return simpson_recurse(f, {a, b, fa, fm, fb, whole}, tol, max_depth);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidInput("least_squares: need at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InvalidInput("least_squares: abscissae are all equal");
    LinearFit fit{};
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    // A constant series is fitted exactly by a flat line.
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

} // namespace perstab
