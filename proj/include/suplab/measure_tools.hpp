#pragma once

// Finitely supported per-cell probability measures: the discrete stand-in for
// Young measures generated by gradient sequences.

#include <functional>
#include <span>
#include <vector>

#include "suplab/energy.hpp"
#include "suplab/exponent_space.hpp"
#include "suplab/report.hpp"

namespace suplab {

struct Atom {
    std::vector<double> xi;
    double weight;
};

class DiscreteYoungMeasure {
public:
    /// One atom list per cell; weights positive and summing to 1 within 1e-12.
    DiscreteYoungMeasure(GridPtr grid, std::vector<std::vector<Atom>> atoms);

    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] std::span<const Atom> atoms(std::size_t cell) const { return atoms_[cell]; }
    [[nodiscard]] int xi_dim() const noexcept { return xi_dim_; }

private:
    GridPtr grid_;
    std::vector<std::vector<Atom>> atoms_;
    int xi_dim_;
};

/// Per cell, sum_a w_a xi_a.
GridFunction barycenter(const DiscreteYoungMeasure& mu);

/// f(x, u, sum_a w_a xi_a) <= max_a f(x, u, xi_a). Requires f declared level convex.
RelationReport jensen_check(const DensitySpec& f, std::size_t cell, std::span<const double> u_val,
                            std::span<const Atom> atoms);

/// Same inequality for an arbitrary function of xi (used to probe densities
/// that are not level convex).
RelationReport jensen_check(const std::function<double(std::span<const double>)>& f, std::span<const Atom> atoms);

struct QLimitRow {
    double q;
    double value;
    double error;
};

struct QLimitTable {
    std::vector<QLimitRow> rows;
    double limit = 0.0;  // max_i max_a f(x_i, u_i, xi_a)
    double final_error = 0.0;
};

/// Rows (q, (sum_i w_i sum_a w_a f^q)^{1/q}) in log domain. With
/// normalize_mass the cell weights are divided by the total measure, which
/// makes every row a power mean (nondecreasing in q).
QLimitTable young_q_limit(const DensitySpec& f, const GridFunction& u, const DiscreteYoungMeasure& mu,
                          std::span<const double> q_values, bool normalize_mass = false);

/// 2, 4, 8, ..., 1024.
std::vector<double> default_q_schedule();

}  // namespace suplab
