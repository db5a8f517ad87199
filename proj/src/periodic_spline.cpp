#include "perstab/periodic_spline.hpp"

#include "perstab/tridiagonal.hpp"

#include <cmath>

namespace perstab {

PeriodicSpline::PeriodicSpline(const Profile& profile)
    : grid_(profile.grid()), y_(profile.values().begin(), profile.values().end()) {
    const std::size_t n = y_.size();
    const double h = grid_.spacing();
    std::vector<double> a(n, 1.0 / 6.0), b(n, 4.0 / 6.0), c(n, 1.0 / 6.0), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = y_[(i + n - 1) % n];
        const double next = y_[(i + 1) % n];
        d[i] = (next - 2.0 * y_[i] + prev) / (h * h);
    }
    m_ = solve_cyclic_tridiagonal(a, b, c, d);
}

void PeriodicSpline::locate(double x, std::size_t& i, double& t) const {
    const double h = grid_.spacing();
    const double period = grid_.period();
    // Shift so node i sits at s = i h.
    double s = std::fmod(x - 0.5 * h, period);
    if (s < 0.0) s += period;
    double k = std::floor(s / h);
    t = s - k * h;
    if (k >= static_cast<double>(y_.size())) { // s rounded up to the period
        k = 0.0;
        t = 0.0;
    }
    i = static_cast<std::size_t>(k);
}

double PeriodicSpline::value(double x) const {
    std::size_t i;
    double t;
    locate(x, i, t);
    const std::size_t j = (i + 1) % y_.size();
    const double h = grid_.spacing();
    const double A = (h - t) / h;
    const double B = t / h;
    return A * y_[i] + B * y_[j] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[j]) * h * h / 6.0;
}

double PeriodicSpline::derivative(double x) const {
    std::size_t i;
    double t;
    locate(x, i, t);
    const std::size_t j = (i + 1) % y_.size();
    const double h = grid_.spacing();
    const double A = (h - t) / h;
    const double B = t / h;
    return (y_[j] - y_[i]) / h + (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[j]) * h / 6.0;
}

} // namespace perstab
