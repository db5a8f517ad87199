#pragma once

#include <span>
#include <vector>

namespace perstab {

/// Solves a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i with the Thomas algorithm.
/// a[0] and c[n-1] are ignored. Throws SolverError on a zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> a, std::span<const double> b,
                                      std::span<const double> c, std::span<const double> d);

/// Periodic variant: a[0] couples x_0 to x_{n-1} and c[n-1] couples x_{n-1} to x_0.
/// Sherman-Morrison correction on top of two Thomas sweeps; n >= 3.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> a, std::span<const double> b,
                                             std::span<const double> c, std::span<const double> d);

} // namespace perstab
