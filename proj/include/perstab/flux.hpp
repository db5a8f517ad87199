#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>

namespace perstab {

using FluxParams = std::map<std::string, double>;

/// Roots of u -> d_u f(u, x) at fixed x, sorted ascending. At most four.
struct SonicPoints {
    std::array<double, 4> at{};
    int count = 0;

    void push(double s) { at[static_cast<std::size_t>(count++)] = s; }
};

/// Flux f(u, x), C^2 in u and C^1, periodic in x.
class FluxFunction {
public:
    virtual ~FluxFunction() = default;

    virtual double eval(double u, double x) const = 0;
    virtual double d_u(double u, double x) const = 0;
    virtual double d_uu(double u, double x) const = 0;
    /// Partial derivative in x at fixed u.
    virtual double d_x(double u, double x) const = 0;
    virtual SonicPoints sonic_points(double x) const = 0;
};

/// Immutable handle to a flux together with its period and provenance.
class FluxModel {
public:
    FluxModel(std::shared_ptr<const FluxFunction> fn, double period, std::string label,
              FluxParams params = {});

    double eval(double u, double x) const { return fn_->eval(u, x); }
    double d_u(double u, double x) const { return fn_->d_u(u, x); }
    double d_uu(double u, double x) const { return fn_->d_uu(u, x); }
    double d_x(double u, double x) const { return fn_->d_x(u, x); }
    SonicPoints sonic_points(double x) const { return fn_->sonic_points(x); }

    /// Integral of max(d_u f(s, x), 0) over s in [lo, hi]; signed if hi < lo.
    double positive_variation(double lo, double hi, double x) const;

    double period() const noexcept { return period_; }
    const std::string& label() const noexcept { return label_; }
    const FluxParams& params() const noexcept { return params_; }

    /// True when the model is one of the registry fluxes and can be rebuilt from
    /// label + params (used by family files).
    bool is_builtin() const;

private:
    std::shared_ptr<const FluxFunction> fn_;
    double period_;
    std::string label_;
    FluxParams params_;
};

/// Registry of built-in fluxes.
///
///   constant_flux_burgers  f = u^2/2                              params: T
///   forced_burgers         f = u^2/2 + A sin(2 pi x/T) u          params: A, T
///   periodic_advection     f = a0 (1 + A cos(2 pi x/T)) u         params: a0 > 0, |A| < 1, T
///   custom_table           f = sum_{k<=3} u^k C_k(x), with
///                          C_k(x) = uk + sum_m uk_cos{m} cos(2 pi m x/T) + uk_sin{m} sin(...)
///                          keys such as "u2", "u1_cos1", "u0_sin3"; m in 1..8; params: T
///
/// T defaults to 1, A to 0.5, a0 to 1. Unknown labels or keys throw InvalidInput.
FluxModel builtin_flux(const std::string& label, const FluxParams& params = {});

/// Engquist-Osher numerical flux between states `left` and `right` at the
/// interface position x: f(right, x) + int_right^left max(d_u f(s, x), 0) ds.
double engquist_osher(const FluxModel& flux, double left, double right, double x);

/// The flux -f(u, x); its stationary problem is the adjoint-type cell problem
/// used to construct the energy weight.
FluxModel reversed_flux(const FluxModel& flux);

} // namespace perstab
