#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace perstab {

/// One snapshot's worth of observables. Fields an observer does not fill stay NaN
/// (or -1 for the counts) and are written as such.
struct DiagnosticsRow {
    static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

    double time = kUnset;
    double l1_dist = kUnset;  ///< h sum |u - background|
    double l2_dist = kUnset;
    double linf_V = kUnset;   ///< max |V|, V the primitive of u - background
    double l2_V = kUnset;
    double weighted_energy = kUnset;
    double total_eta = kUnset;
    double dissipation = kUnset;
    int lap_number = -1;
    int sign_changes = -1;
    double mass_offset = kUnset; ///< h sum (u - background) minus its initial value
    double l1_pi = kUnset;
    double nash_ratio = kUnset;
};

/// Column-oriented time series of snapshot observables.
class DiagnosticsSeries {
public:
    /// Appends a row; times must increase strictly.
    void append(const DiagnosticsRow& row);

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    DiagnosticsRow row(std::size_t k) const;

    /// Header: t,l1_dist,l2_dist,linf_V,l2_V,weighted_energy,total_eta,dissipation,
    /// lap_number,sign_changes,mass_offset
    void write_csv(std::ostream& os) const;
    /// Header: t,total_eta,dissipation,L1_pi,nash_ratio,L2_dist
    void write_entropy_csv(std::ostream& os) const;

    std::vector<double> times;
    std::vector<double> l1_dist, l2_dist, linf_V, l2_V, weighted_energy, total_eta, dissipation;
    std::vector<int> lap_number, sign_changes;
    std::vector<double> mass_offset, l1_pi, nash_ratio;
};

/// Round-trip decimal formatting used by every CSV writer ("%.17g").
std::string format_real(double v);

} // namespace perstab
