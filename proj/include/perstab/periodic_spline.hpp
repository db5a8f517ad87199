#pragma once

#include "perstab/grid.hpp"

#include <vector>

namespace perstab {

/// Periodic cubic spline through a profile's cell-centre samples.
class PeriodicSpline {
public:
    explicit PeriodicSpline(const Profile& profile);

    double value(double x) const;
    double derivative(double x) const;

private:
    // Locates x in the periodic grid: interval index and local coordinate in [0, h).
    void locate(double x, std::size_t& i, double& t) const;

    CellGrid grid_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the nodes
};

} // namespace perstab
