#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace perstab {

/// Uniform cell-centred discretisation of one flux period [0, period).
class CellGrid {
public:
    static constexpr std::size_t kMinCells = 8;

    CellGrid(std::size_t n_cells, double period);

    std::size_t size() const noexcept { return n_cells_; }
    double period() const noexcept { return period_; }
    double spacing() const noexcept { return h_; }

    /// Cell centre (i + 1/2) h.
    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }
    /// Right interface (i + 1) h.
    double interface(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }

    bool operator==(const CellGrid&) const = default;

private:
    std::size_t n_cells_;
    double period_;
    double h_;
};

enum class BoundaryMode { pinned_to_wp, periodic };

BoundaryMode parse_boundary_mode(const std::string& name);
std::string to_string(BoundaryMode mode);

/// The computational line: n_periods copies of the cell grid starting at
/// `origin`, which must itself be a whole number of periods so that the
/// background profile tiles exactly.
class LineGrid {
public:
    LineGrid(CellGrid cell, std::size_t n_periods, BoundaryMode mode, double origin = 0.0);

    /// Domain centred on zero, e.g. 64 periods span [-32, 32).
    static LineGrid centered(CellGrid cell, std::size_t n_periods, BoundaryMode mode);

    const CellGrid& cell() const noexcept { return cell_; }
    std::size_t n_periods() const noexcept { return n_periods_; }
    BoundaryMode boundary() const noexcept { return mode_; }
    double origin() const noexcept { return origin_; }

    std::size_t size() const noexcept { return n_periods_ * cell_.size(); }
    double spacing() const noexcept { return cell_.spacing(); }
    double length() const noexcept { return static_cast<double>(n_periods_) * cell_.period(); }

    double center(std::size_t i) const noexcept {
        return origin_ + (static_cast<double>(i) + 0.5) * cell_.spacing();
    }
    /// Position of interface i + 1/2 (between cells i and i + 1); i may be -1 .. size()-1.
    double interface(std::ptrdiff_t i) const noexcept {
        return origin_ + static_cast<double>(i + 1) * cell_.spacing();
    }
    /// Index of line cell i within the period.
    std::size_t cell_index(std::size_t i) const noexcept { return i % cell_.size(); }

private:
    CellGrid cell_;
    std::size_t n_periods_;
    BoundaryMode mode_;
    double origin_;
};

/// A Y-periodic function sampled at the cell centres.
class Profile {
public:
    Profile(CellGrid grid, std::vector<double> values);

    static Profile constant(CellGrid grid, double value);

    const CellGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const noexcept { return mean_; }
    double min() const;
    double max() const;

    /// Repeat the profile over every period of the line.
    std::vector<double> tile(const LineGrid& line) const;

private:
    CellGrid grid_;
    std::vector<double> values_;
    double mean_;
};

} // namespace perstab
