#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace perstab {

enum class NormKind { L1, L2, Linf };

/// Midpoint-rule norms on a uniform grid: L1 = h sum|v|, L2 = sqrt(h sum v^2), Linf = max|v|.
double norm(std::span<const double> values, double h, NormKind kind);

/// Cumulative primitive V_i = h * sum_{j<=i} u_j, i.e. the integral up to the
/// right interface of cell i with zero inflow on the left.
std::vector<double> primitive(std::span<const double> u, double h);

/// Elementwise a - b.
std::vector<double> difference(std::span<const double> a, std::span<const double> b);

/// Adaptive Simpson quadrature of f over [a, b] to the given relative tolerance
/// (absolute floor `abs_tol`). Returns the signed integral, so b < a is allowed.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol = 1e-300, int max_depth = 60);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double slope;
    double intercept;
    double r_squared;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

} // namespace perstab
