#include "perstab/series.hpp"

#include "perstab/errors.hpp"

#include <cstdio>
#include <ostream>

namespace perstab {

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void DiagnosticsSeries::append(const DiagnosticsRow& r) {
    if (!times.empty() && !(r.time > times.back())) {
        throw InvalidInput("DiagnosticsSeries: times must increase strictly");
    }
    times.push_back(r.time);
    l1_dist.push_back(r.l1_dist);
    l2_dist.push_back(r.l2_dist);
    linf_V.push_back(r.linf_V);
    l2_V.push_back(r.l2_V);
    weighted_energy.push_back(r.weighted_energy);
    total_eta.push_back(r.total_eta);
    dissipation.push_back(r.dissipation);
    lap_number.push_back(r.lap_number);
    sign_changes.push_back(r.sign_changes);
    mass_offset.push_back(r.mass_offset);
    l1_pi.push_back(r.l1_pi);
    nash_ratio.push_back(r.nash_ratio);
}

DiagnosticsRow DiagnosticsSeries::row(std::size_t k) const {
    DiagnosticsRow r;
    r.time = times.at(k);
    r.l1_dist = l1_dist[k];
    r.l2_dist = l2_dist[k];
    r.linf_V = linf_V[k];
    r.l2_V = l2_V[k];
    r.weighted_energy = weighted_energy[k];
    r.total_eta = total_eta[k];
    r.dissipation = dissipation[k];
    r.lap_number = lap_number[k];
    r.sign_changes = sign_changes[k];
    r.mass_offset = mass_offset[k];
    r.l1_pi = l1_pi[k];
    r.nash_ratio = nash_ratio[k];
    return r;
}

void DiagnosticsSeries::write_csv(std::ostream& os) const {
    os << "t,l1_dist,l2_dist,linf_V,l2_V,weighted_energy,total_eta,dissipation,"
          "lap_number,sign_changes,mass_offset\n";
    for (std::size_t k = 0; k < size(); ++k) {
        os << format_real(times[k]) << ',' << format_real(l1_dist[k]) << ','
           << format_real(l2_dist[k]) << ',' << format_real(linf_V[k]) << ','
           << format_real(l2_V[k]) << ',' << format_real(weighted_energy[k]) << ','
           << format_real(total_eta[k]) << ',' << format_real(dissipation[k]) << ','
           << lap_number[k] << ',' << sign_changes[k] << ',' << format_real(mass_offset[k]) << '\n';
    }
}

void DiagnosticsSeries::write_entropy_csv(std::ostream& os) const {
    os << "t,total_eta,dissipation,L1_pi,nash_ratio,L2_dist\n";
    for (std::size_t k = 0; k < size(); ++k) {
        os << format_real(times[k]) << ',' << format_real(total_eta[k]) << ','
           << format_real(dissipation[k]) << ',' << format_real(l1_pi[k]) << ','
           << format_real(nash_ratio[k]) << ',' << format_real(l2_dist[k]) << '\n';
    }
}

} // namespace perstab
