#include "perstab/grid.hpp"

#include "perstab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace perstab {

CellGrid::CellGrid(std::size_t n_cells, double period)
    : n_cells_(n_cells), period_(period), h_(period / static_cast<double>(n_cells)) {
    if (n_cells < kMinCells) {
        throw InvalidInput("CellGrid: need at least 8 cells per period, got " +
                           std::to_string(n_cells));
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidInput("CellGrid: period must be positive and finite");
    }
}

BoundaryMode parse_boundary_mode(const std::string& name) {
    if (name == "pinned_to_wp") return BoundaryMode::pinned_to_wp;
    if (name == "periodic") return BoundaryMode::periodic;
    throw InvalidInput("unknown boundary mode '" + name + "'");
}

std::string to_string(BoundaryMode mode) {
    return mode == BoundaryMode::periodic ? "periodic" : "pinned_to_wp";
}

LineGrid::LineGrid(CellGrid cell, std::size_t n_periods, BoundaryMode mode, double origin)
    : cell_(cell), n_periods_(n_periods), mode_(mode), origin_(origin) {
    if (n_periods == 0) throw InvalidInput("LineGrid: n_periods must be positive");
    const double k = origin / cell.period();
    if (std::abs(k - std::round(k)) > 1e-12 * (1.0 + std::abs(k))) {
        throw InvalidInput("LineGrid: origin must be an integer multiple of the flux period");
    }
}

LineGrid LineGrid::centered(CellGrid cell, std::size_t n_periods, BoundaryMode mode) {
    const double origin = -static_cast<double>(n_periods / 2) * cell.period();
    return LineGrid(cell, n_periods, mode, origin);
}

Profile::Profile(CellGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)), mean_(0.0) {
    if (values_.size() != grid_.size()) {
        throw InvalidInput("Profile: value count does not match the cell grid");
    }
    double sum = 0.0;
    for (double v : values_) sum += v;
    mean_ = sum / static_cast<double>(values_.size());
}

Profile Profile::constant(CellGrid grid, double value) {
    return Profile(grid, std::vector<double>(grid.size(), value));
}

double Profile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Profile::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<double> Profile::tile(const LineGrid& line) const {
    if (!(line.cell() == grid_)) {
        throw InvalidInput("Profile::tile: line grid uses a different cell grid");
    }
    std::vector<double> out;
    out.reserve(line.size());
    for (std::size_t k = 0; k < line.n_periods(); ++k) {
        out.insert(out.end(), values_.begin(), values_.end());
    }
    return out;
}

} // namespace perstab
