#include "perstab/flux.hpp"

#include "perstab/errors.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <utility>

namespace perstab {

FluxModel::FluxModel(std::shared_ptr<const FluxFunction> fn, double period, std::string label,
                     FluxParams params)
    : fn_(std::move(fn)), period_(period), label_(std::move(label)), params_(std::move(params)) {
    if (!fn_) throw InvalidInput("FluxModel: null flux function");
    if (!(period_ > 0.0) || !std::isfinite(period_)) {
        throw InvalidInput("FluxModel: period must be positive");
    }
}

double FluxModel::positive_variation(double lo, double hi, double x) const {
    if (hi < lo) return -positive_variation(hi, lo, x);
    if (hi == lo) return 0.0;
    const SonicPoints sonic = fn_->sonic_points(x);
    double total = 0.0;
    double a = lo;
    double fa = fn_->eval(a, x);
    auto piece = [&](double b) {
        const double fb = fn_->eval(b, x);
        if (fn_->d_u(0.5 * (a + b), x) > 0.0) total += fb - fa;
        a = b;
        fa = fb;
    };
    for (int k = 0; k < sonic.count; ++k) {
        const double s = sonic.at[static_cast<std::size_t>(k)];
        if (s > a && s < hi) piece(s);
    }
    piece(hi);
    return total;
}

double engquist_osher(const FluxModel& flux, double left, double right, double x) {
    return flux.eval(right, x) + flux.positive_variation(right, left, x);
}

bool FluxModel::is_builtin() const {
    return label_ == "constant_flux_burgers" || label_ == "forced_burgers" ||
           label_ == "periodic_advection" || label_ == "custom_table";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param_or(const FluxParams& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!std::isfinite(it->second)) throw InvalidInput("flux parameter '" + key + "' is not finite");
    return it->second;
}

void check_keys(const FluxParams& params, std::initializer_list<const char*> allowed,
                const std::string& label) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InvalidInput("flux '" + label + "': unknown parameter '" + key + "'");
    }
}

double checked_period(const FluxParams& params) {
    const double T = param_or(params, "T", 1.0);
    if (!(T > 0.0)) throw InvalidInput("flux parameter T must be positive");
    return T;
}

class ConstantBurgers final : public FluxFunction {
public:
    double eval(double u, double) const override { return 0.5 * u * u; }
    double d_u(double u, double) const override { return u; }
    double d_uu(double, double) const override { return 1.0; }
    double d_x(double, double) const override { return 0.0; }
    SonicPoints sonic_points(double) const override {
        SonicPoints s;
        s.push(0.0);
        return s;
    }
};

class ForcedBurgers final : public FluxFunction {
public:
    ForcedBurgers(double amplitude, double period) : A_(amplitude), k_(kTwoPi / period) {}

    double eval(double u, double x) const override {
        return 0.5 * u * u + A_ * std::sin(k_ * x) * u;
    }
    double d_u(double u, double x) const override { return u + A_ * std::sin(k_ * x); }
    double d_uu(double, double) const override { return 1.0; }
    double d_x(double u, double x) const override { return A_ * k_ * std::cos(k_ * x) * u; }
    SonicPoints sonic_points(double x) const override {
        SonicPoints s;
        s.push(-A_ * std::sin(k_ * x));
        return s;
    }

private:
    double A_;
    double k_;
};

class PeriodicAdvection final : public FluxFunction {
public:
    PeriodicAdvection(double a0, double amplitude, double period)
        : a0_(a0), A_(amplitude), k_(kTwoPi / period) {}

    double speed(double x) const { return a0_ * (1.0 + A_ * std::cos(k_ * x)); }
    double eval(double u, double x) const override { return speed(x) * u; }
    double d_u(double, double x) const override { return speed(x); }
    double d_uu(double, double) const override { return 0.0; }
    double d_x(double u, double x) const override { return -a0_ * A_ * k_ * std::sin(k_ * x) * u; }
    SonicPoints sonic_points(double) const override { return {}; }

private:
    double a0_;
    double A_;
    double k_;
};

/// f(u, x) = sum_k u^k C_k(x) with trigonometric-polynomial coefficients.
class CustomTable final : public FluxFunction {
public:
    static constexpr int kDegree = 3;
    static constexpr int kModes = 8;

    CustomTable(const FluxParams& params, double period) : k_(kTwoPi / period) {
        static const std::regex key_re(R"(u([0-3])(?:_(cos|sin)([1-8]))?)");
        for (const auto& [key, value] : params) {
            if (key == "T") continue;
            std::smatch m;
            if (!std::regex_match(key, m, key_re)) {
                throw InvalidInput("flux 'custom_table': unknown parameter '" + key + "'");
            }
            const int k = std::stoi(m[1].str());
            if (!std::isfinite(value)) throw InvalidInput("custom_table: non-finite coefficient");
            if (!m[2].matched) {
                c_[k][0] = value;
            } else {
                const int mode = std::stoi(m[3].str());
                (m[2].str() == "cos" ? c_[k][mode] : s_[k][mode]) = value;
            }
        }
    }

    double eval(double u, double x) const override {
        double acc = 0.0;
        for (int k = kDegree; k >= 0; --k) acc = acc * u + coeff(k, x);
        return acc;
    }
    double d_u(double u, double x) const override {
        return coeff(1, x) + u * (2.0 * coeff(2, x) + 3.0 * u * coeff(3, x));
    }
    double d_uu(double u, double x) const override {
        return 2.0 * coeff(2, x) + 6.0 * u * coeff(3, x);
    }
    double d_x(double u, double x) const override {
        double acc = 0.0;
        for (int k = kDegree; k >= 0; --k) acc = acc * u + dcoeff(k, x);
        return acc;
    }
    SonicPoints sonic_points(double x) const override {
        // d_u f = c1 + 2 c2 u + 3 c3 u^2
        const double a = 3.0 * coeff(3, x);
        const double b = 2.0 * coeff(2, x);
        const double c = coeff(1, x);
        SonicPoints s;
        if (a == 0.0) {
            if (b != 0.0) s.push(-c / b);
            return s;
        }
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return s;
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        double r1 = q / a;
        double r2 = q != 0.0 ? c / q : r1;
        if (r1 > r2) std::swap(r1, r2);
        s.push(r1);
        if (r2 != r1) s.push(r2);
        return s;
    }

private:
    double coeff(int k, double x) const {
        double acc = c_[k][0];
        for (int m = 1; m <= kModes; ++m) {
            if (c_[k][m] != 0.0) acc += c_[k][m] * std::cos(m * k_ * x);
            if (s_[k][m] != 0.0) acc += s_[k][m] * std::sin(m * k_ * x);
        }
        return acc;
    }
    double dcoeff(int k, double x) const {
        double acc = 0.0;
        for (int m = 1; m <= kModes; ++m) {
            if (c_[k][m] != 0.0) acc -= c_[k][m] * m * k_ * std::sin(m * k_ * x);
            if (s_[k][m] != 0.0) acc += s_[k][m] * m * k_ * std::cos(m * k_ * x);
        }
        return acc;
    }

    double k_;
    std::array<std::array<double, kModes + 1>, kDegree + 1> c_{};
    std::array<std::array<double, kModes + 1>, kDegree + 1> s_{};
};

class Reversed final : public FluxFunction {
public:
    explicit Reversed(FluxModel base) : base_(std::move(base)) {}

    double eval(double u, double x) const override { return -base_.eval(u, x); }
    double d_u(double u, double x) const override { return -base_.d_u(u, x); }
    double d_uu(double u, double x) const override { return -base_.d_uu(u, x); }
    double d_x(double u, double x) const override { return -base_.d_x(u, x); }
    SonicPoints sonic_points(double x) const override { return base_.sonic_points(x); }

private:
    FluxModel base_;
};

} // namespace

FluxModel builtin_flux(const std::string& label, const FluxParams& params) {
    if (label == "constant_flux_burgers") {
        check_keys(params, {"T"}, label);
        return FluxModel(std::make_shared<ConstantBurgers>(), checked_period(params), label, params);
    }
    if (label == "forced_burgers") {
        check_keys(params, {"A", "T"}, label);
        const double T = checked_period(params);
        const double A = param_or(params, "A", 0.5);
        return FluxModel(std::make_shared<ForcedBurgers>(A, T), T, label, params);
    }
    if (label == "periodic_advection") {
        check_keys(params, {"a0", "A", "T"}, label);
        const double T = checked_period(params);
        const double a0 = param_or(params, "a0", 1.0);
        const double A = param_or(params, "A", 0.5);
        if (!(a0 > 0.0)) throw InvalidInput("periodic_advection: a0 must be positive");
        if (!(std::abs(A) < 1.0)) throw InvalidInput("periodic_advection: need |A| < 1");
        return FluxModel(std::make_shared<PeriodicAdvection>(a0, A, T), T, label, params);
    }
    if (label == "custom_table") {
        const double T = checked_period(params);
        return FluxModel(std::make_shared<CustomTable>(params, T), T, label, params);
    }
    throw InvalidInput("unknown flux label '" + label + "'");
}

FluxModel reversed_flux(const FluxModel& flux) {
    return FluxModel(std::make_shared<Reversed>(flux), flux.period(), "reversed(" + flux.label() + ")",
                     flux.params());
}

} // namespace perstab
