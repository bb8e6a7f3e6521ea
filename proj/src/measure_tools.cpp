#include "suplab/measure_tools.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "suplab/errors.hpp"

namespace suplab {

DiscreteYoungMeasure::DiscreteYoungMeasure(GridPtr grid, std::vector<std::vector<Atom>> atoms)
    : grid_(std::move(grid)), atoms_(std::move(atoms)), xi_dim_(0) {
    if (!grid_) throw StructuralError("DiscreteYoungMeasure: null grid");
    if (atoms_.size() != grid_->size()) throw StructuralError("DiscreteYoungMeasure: one atom list per cell");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& cell = atoms_[i];
        if (cell.empty()) throw StructuralError("DiscreteYoungMeasure: empty cell " + std::to_string(i));
        double total = 0.0;
        for (const Atom& a : cell) {
            if (!(a.weight > 0.0)) throw StructuralError("DiscreteYoungMeasure: nonpositive atom weight");
            if (xi_dim_ == 0) xi_dim_ = static_cast<int>(a.xi.size());
            if (static_cast<int>(a.xi.size()) != xi_dim_ || xi_dim_ == 0)
                throw StructuralError("DiscreteYoungMeasure: inconsistent atom dimension");
            total += a.weight;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw StructuralError("DiscreteYoungMeasure: weights in cell " + std::to_string(i) + " sum to " +
                                  std::to_string(total));
    }
}

GridFunction barycenter(const DiscreteYoungMeasure& mu) {
    const auto dim = static_cast<std::size_t>(mu.xi_dim());
    std::vector<double> v(mu.grid().size() * dim, 0.0);
    for (std::size_t i = 0; i < mu.grid().size(); ++i) {
        for (const Atom& a : mu.atoms(i)) {
            for (std::size_t j = 0; j < dim; ++j) v[i * dim + j] += a.weight * a.xi[j];
        }
    }
    return {mu.grid_ptr(), mu.xi_dim(), std::move(v)};
}

RelationReport jensen_check(const std::function<double(std::span<const double>)>& f, std::span<const Atom> atoms) {
    if (atoms.empty()) throw PreconditionError("jensen_check: no atoms");
    const std::size_t dim = atoms.front().xi.size();
    std::vector<double> mean(dim, 0.0);
    double ess_sup = -std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms) {
        for (std::size_t j = 0; j < dim; ++j) mean[j] += a.weight * a.xi[j];
        ess_sup = std::max(ess_sup, f(a.xi));
    }
    RelationReport r;
    r.add_leq("jensen", f(mean), ess_sup, 1e-12);
    return r;
}

RelationReport jensen_check(const DensitySpec& f, std::size_t cell, std::span<const double> u_val,
                            std::span<const Atom> atoms) {
    if (!f.level_convex()) throw PreconditionError("jensen_check: density not declared level convex");
    return jensen_check([&](std::span<const double> xi) { return eval_density(f, cell, u_val, xi); }, atoms);
}

QLimitTable young_q_limit(const DensitySpec& f, const GridFunction& u, const DiscreteYoungMeasure& mu,
                          std::span<const double> q_values, bool normalize_mass) {
    if (!u.grid().same_as(mu.grid()) || !f.grid().same_as(mu.grid()))
        throw StructuralError("young_q_limit: grid mismatch");
    const Grid& g = mu.grid();
    const double mass = normalize_mass ? g.total_measure() : 1.0;

    // Flatten (log cell weight + log atom weight, log f) pairs once.
    struct Term {
        double log_weight;
        double log_f;
    };
    std::vector<Term> terms;
    double limit = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (const Atom& a : mu.atoms(i)) {
            const double v = eval_density(f, i, u.at(i), a.xi);
            limit = std::max(limit, v);
            if (v > 0.0) terms.push_back({std::log(g.weight(i) / mass) + std::log(a.weight), std::log(v)});
        }
    }

    QLimitTable table;
    table.limit = limit;
    for (double q : q_values) {
        if (!(q > 0.0)) throw PreconditionError("young_q_limit: q must be positive");
        double value = 0.0;
        if (!terms.empty()) {
            double peak = -std::numeric_limits<double>::infinity();
            for (const Term& t : terms) peak = std::max(peak, t.log_weight + q * t.log_f);
            double sum = 0.0;
            for (const Term& t : terms) sum += std::exp(t.log_weight + q * t.log_f - peak);
            value = std::exp((peak + std::log(sum)) / q);
        }
        table.rows.push_back({q, value, std::abs(value - limit)});
    }
    table.final_error = table.rows.empty() ? 0.0 : table.rows.back().error;
    return table;
}

std::vector<double> default_q_schedule() {
    std::vector<double> q;
    for (double v = 2.0; v <= 1024.0; v *= 2.0) q.push_back(v);
    return q;
}

}  // namespace suplab
