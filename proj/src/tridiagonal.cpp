#include "perstab/tridiagonal.hpp"

#include "perstab/errors.hpp"

#include <cmath>

namespace perstab {

std::vector<double> solve_tridiagonal(std::span<const double> a, std::span<const double> b,
                                      std::span<const double> c, std::span<const double> d) {
    const std::size_t n = b.size();
    if (a.size() != n || c.size() != n || d.size() != n) {
        throw InvalidInput("solve_tridiagonal: coefficient sizes differ");
    }
    if (n == 0) return {};

    std::vector<double> cp(n), x(n);
    double pivot = b[0];
    if (pivot == 0.0) throw SolverError("solve_tridiagonal: zero pivot in row 0");
    cp[0] = c[0] / pivot;
    x[0] = d[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = b[i] - a[i] * cp[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SolverError("solve_tridiagonal: zero pivot in row " + std::to_string(i));
        }
        cp[i] = c[i] / pivot;
        x[i] = (d[i] - a[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
    return x;
}

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> a, std::span<const double> b,
                                             std::span<const double> c, std::span<const double> d) {
    const std::size_t n = b.size();
    if (a.size() != n || c.size() != n || d.size() != n) {
        throw InvalidInput("solve_cyclic_tridiagonal: coefficient sizes differ");
    }
    if (n < 3) throw InvalidInput("solve_cyclic_tridiagonal: need n >= 3");

    // A = T + u v^T with u = (gamma, 0, .., 0, c_{n-1}), v = (1, 0, .., 0, a_0 / gamma).
    const double alpha = c[n - 1]; // row n-1, column 0
    const double beta = a[0];      // row 0, column n-1
    const double gamma = -b[0];

    std::vector<double> bb(b.begin(), b.end());
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;

    const std::vector<double> x = solve_tridiagonal(a, bb, c, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = solve_tridiagonal(a, bb, c, u);

    const double denom = 1.0 + z[0] + beta / gamma * z[n - 1];
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw SolverError("solve_cyclic_tridiagonal: singular Sherman-Morrison update");
    }
    const double fact = (x[0] + beta / gamma * x[n - 1]) / denom;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
}

} // namespace perstab
