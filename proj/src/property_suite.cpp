#include "suplab/property_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "suplab/exponent_space.hpp"
#include "suplab/measure_tools.hpp"
#include "suplab/random.hpp"

namespace suplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Random 1-D grid of random length (total measure below and above 1).
GridPtr random_grid(Rng& rng, int min_cells, int max_cells) {
    const int cells = rng.integer(min_cells, max_cells);
    return Grid::uniform_1d(0.0, rng.log_uniform(0.1, 10.0), cells);
}

std::vector<double> random_exponent(Rng& rng, std::size_t cells, double pm, double pp) {
    std::vector<double> p(cells);
    for (auto& v : p) v = rng.uniform(pm, pp);
    p[rng.index(cells)] = pm;
    p[rng.index(cells)] = pp;
    return p;
}

std::vector<double> random_values(Rng& rng, std::size_t cells, double zero_fraction) {
    const double scale = rng.log_uniform(1e-3, 1e3);
    std::vector<double> u(cells);
    for (auto& v : u) v = rng.uniform() < zero_fraction ? 0.0 : scale * rng.uniform(-1.0, 1.0);
    u[rng.index(cells)] = scale;
    return u;
}

std::string witness_of(std::uint64_t seed, int instance, std::size_t cells) {
    return "seed " + std::to_string(seed) + " instance " + std::to_string(instance) + " cells " +
           std::to_string(cells);
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::vector<Atom> random_atoms(Rng& rng, std::size_t dim) {
    const int count = rng.integer(2, 6);
    std::vector<Atom> atoms(static_cast<std::size_t>(count));
    double total = 0.0;
    const double radius = rng.log_uniform(1e-2, 1e2);
    for (Atom& a : atoms) {
        a.xi.resize(dim);
        for (double& c : a.xi) c = rng.uniform(-radius, radius);
        a.weight = rng.uniform(0.05, 1.0);
        total += a.weight;
    }
    for (Atom& a : atoms) a.weight /= total;
    // Renormalize the last weight so the sum is 1 to rounding.
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) head += atoms[i].weight;
    atoms.back().weight = 1.0 - head;
    return atoms;
}

GridPtr square_grid(int cells) {
    const std::vector<double> lo{0.0, 0.0}, hi{1.0, 1.0};
    const std::vector<int> n{cells, cells};
    return Grid::uniform(lo, hi, n);
}

}  // namespace

void CheckAggregator::add(const RelationReport& instance, const std::string& witness) {
    for (const RelationCheck& c : instance.checks()) {
        auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == c.name; });
        if (it == entries_.end()) {
            entries_.push_back({c.name, 0, 0, kInf, {}});
            it = std::prev(entries_.end());
        }
        ++it->count;
        it->min_slack = std::min(it->min_slack, c.slack);
        if (!c.passed) {
            if (it->failures == 0) it->first_failure = witness + (c.detail.empty() ? "" : ": " + c.detail);
            ++it->failures;
        }
    }
}

RelationReport CheckAggregator::summary(const std::string& prefix) const {
    RelationReport r;
    for (const Entry& e : entries_) {
        r.add(prefix + e.name + " (" + std::to_string(e.count) + " instances, " + std::to_string(e.failures) +
                  " failures)",
              e.failures == 0, e.min_slack, e.first_failure);
    }
    return r;
}

RelationReport norm_modular_suite(int instances, int min_cells, int max_cells, std::uint64_t seed) {
    Rng rng(seed);
    CheckAggregator agg;
    for (int k = 0; k < instances; ++k) {
        const GridPtr grid = random_grid(rng, min_cells, max_cells);
        const std::size_t cells = grid->size();
        const double pm = rng.uniform(1.0, 6.0);
        const double pp = pm * rng.uniform(1.0, 3.0);
        const ExponentField p(grid, random_exponent(rng, cells, pm, pp));
        GridFunction u = GridFunction::scalar(grid, random_values(rng, cells, 0.1));
        // Every tenth instance sits on the unit sphere.
        if (k % 10 == 0) u = u.scaled(1.0 / luxemburg_norm(u, p));
        const std::string witness = witness_of(seed, k, cells);

        RelationReport r = verify_norm_modular_relations(u, p);
        const double norm = luxemburg_norm(u, p);

        const double c = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.log_uniform(1e-3, 1e3);
        const double scaled = luxemburg_norm(u.scaled(c), p);
        const double hom = rel_gap(scaled, std::abs(c) * norm);
        r.add("homogeneity", hom <= 1e-10, 1e-10 - hom);

        const GridFunction v = GridFunction::scalar(grid, random_values(rng, cells, 0.0));
        r.add_leq("triangle", luxemburg_norm(u + v, p), norm + luxemburg_norm(v, p), 1e-10);

        const ExponentField pc = ExponentField::constant(grid, pm);
        const double cons = rel_gap(luxemburg_norm(u, pc), lebesgue_norm(u, pm));
        r.add("constant exponent = q-norm", cons <= 1e-10, 1e-10 - cons);

        std::vector<double> bigger(cells);
        for (std::size_t i = 0; i < cells; ++i) bigger[i] = -u[i] * (1.0 + rng.uniform());
        r.add_leq("modular monotone", modular(u, p), modular(GridFunction::scalar(grid, bigger), p), 1e-12);

        bool strict = true;
        double prev = kInf;
        for (int j = 0; j <= 20; ++j) {
            const double lambda = norm * std::pow(16.0, j / 20.0 - 0.5);
            const double rho = modular_scaled(u, p, lambda);
            if (rho != kInf && !(rho < prev)) strict = false;
            prev = rho;
        }
        r.add("modular strictly decreasing in lambda", strict, 0.0);
        agg.add(r, witness);
    }
    return agg.summary("norms: ");
}

RelationReport holder_suite(int instances, std::uint64_t seed) {
    Rng rng(seed);
    CheckAggregator agg;
    for (int k = 0; k < instances; ++k) {
        const GridPtr grid = random_grid(rng, 16, 128);
        const std::size_t cells = grid->size();
        const GridFunction f = GridFunction::scalar(grid, random_values(rng, cells, 0.05));
        const GridFunction g = GridFunction::scalar(grid, random_values(rng, cells, 0.05));
        std::vector<double> p(cells), q(cells), s(cells);
        const bool unit = k % 2 == 1;
        for (std::size_t i = 0; i < cells; ++i) {
            if (unit) {
                p[i] = rng.uniform(1.2, 5.0);
                q[i] = p[i] / (p[i] - 1.0);
                s[i] = 1.0;
            } else {
                p[i] = rng.uniform(2.0, 8.0);
                q[i] = rng.uniform(2.0, 8.0);
                s[i] = 1.0 / (1.0 / p[i] + 1.0 / q[i]);
            }
        }
        agg.add(holder_check(f, g, ExponentField(grid, p), ExponentField(grid, q), ExponentField(grid, s)),
                witness_of(seed, k, cells));
    }
    return agg.summary("lemmas: ");
}

RelationReport power_identity_suite(int instances, std::uint64_t seed) {
    Rng rng(seed);
    CheckAggregator agg;
    for (int k = 0; k < instances; ++k) {
        const GridPtr grid = random_grid(rng, 16, 256);
        const std::size_t cells = grid->size();
        const double pm = rng.uniform(1.5, 8.0);
        const ExponentField p(grid, random_exponent(rng, cells, pm, pm * rng.uniform(1.0, 3.0)));
        const GridFunction u = GridFunction::scalar(grid, random_values(rng, cells, 0.05));
        const double s = rng.uniform(1.0, pm);
        if (!(s > 1.0 && s < pm)) continue;
        agg.add(power_identity_check(u, p, s), witness_of(seed, k, cells) + " s " + std::to_string(s));
    }
    return agg.summary("lemmas: ");
}

RelationReport embedding_suite(int instances, std::uint64_t seed) {
    Rng rng(seed);
    CheckAggregator agg;
    for (int k = 0; k < instances; ++k) {
        const GridPtr grid = random_grid(rng, 16, 256);
        const std::size_t cells = grid->size();
        const double beta = rng.uniform(1.1, 4.0);
        const double pm = rng.uniform(1.0, 8.0);
        const ExponentField p(grid, random_exponent(rng, cells, pm, pm * rng.uniform(1.0, beta)));
        const GridFunction u = GridFunction::scalar(grid, random_values(rng, cells, 0.05));
        const double q = k % 4 == 0 ? p.p_minus() : rng.uniform(1.0, p.p_minus());
        agg.add(embedding_bound_check(u, p, q, beta),
                witness_of(seed, k, cells) + " q " + std::to_string(q) + " beta " + std::to_string(beta));
    }
    return agg.summary("lemmas: ");
}

std::vector<DensitySpec> level_convex_families(int cells) {
    const GridPtr grid = square_grid(cells);
    std::vector<DensitySpec> out;
    out.push_back(DensitySpec::weighted_norm(grid, CoefficientProfile::inv_one_plus_x()).with_growth(0.5, 1.0));
    out.push_back(DensitySpec::shifted_norm(grid, {0.3, -0.2}));
    out.push_back(DensitySpec::anisotropic(grid, CoefficientProfile::constant(1.0), {1.0, 2.0}).with_growth(0.8, 1.0));
    out.push_back(DensitySpec::custom(grid, CustomRule::capped_norm, CoefficientProfile::linear(1.0, 1.0), 0.0, true));
    out.push_back(DensitySpec::custom(grid, CustomRule::power_norm, CoefficientProfile::piecewise(1.0, 2.0), 2.0, true)
                      .with_growth(1.0, 2.0));
    return out;
}

DensitySpec annulus_density(int cells) {
    return DensitySpec::custom(square_grid(cells), CustomRule::annulus, CoefficientProfile::constant(1.0), 0.0, false);
}

RelationReport jensen_suite(int trials, std::uint64_t seed) {
    RelationReport out;
    std::uint64_t stream = seed;
    for (const DensitySpec& f : level_convex_families()) {
        Rng rng(++stream);
        CheckAggregator agg;
        const auto dim = static_cast<std::size_t>(f.xi_dim());
        std::vector<double> u(static_cast<std::size_t>(f.components()));
        for (int t = 0; t < trials; ++t) {
            const std::size_t cell = rng.index(f.grid().size());
            for (double& c : u) c = rng.uniform(-2.0, 2.0);
            const std::vector<Atom> atoms = random_atoms(rng, dim);
            agg.add(jensen_check(f, cell, u, atoms), "trial " + std::to_string(t) + " cell " + std::to_string(cell));
        }
        out.merge(agg.summary("jensen " + f.describe() + ": "));
    }

    const DensitySpec annulus = annulus_density();
    Rng rng(++stream);
    int violations = 0;
    std::string first;
    const std::vector<double> u{0.0};
    for (int t = 0; t < trials; ++t) {
        const std::size_t cell = rng.index(annulus.grid().size());
        const std::vector<Atom> atoms = random_atoms(rng, static_cast<std::size_t>(annulus.xi_dim()));
        const auto r = jensen_check([&](std::span<const double> xi) { return eval_density(annulus, cell, u, xi); },
                                    atoms);
        if (!r.all_passed()) {
            if (violations == 0) first = "trial " + std::to_string(t);
            ++violations;
        }
    }
    out.add("jensen control " + annulus.describe() + " records a violation (" + std::to_string(violations) + " of " +
                std::to_string(trials) + ")",
            violations > 0, static_cast<double>(violations), first);
    return out;
}

RelationReport q_limit_suite(std::uint64_t seed) {
    RelationReport out;
    {
        const GridPtr grid = Grid::uniform_1d(0.0, 1.0, 1);
        const DensitySpec f = DensitySpec::weighted_norm(grid, CoefficientProfile::constant(1.0));
        const GridFunction u = GridFunction::constant(grid, 0.0);
        const DiscreteYoungMeasure mu(grid, {{{{1.0}, 0.5}, {{3.0}, 0.5}}});
        const auto q = default_q_schedule();
        const QLimitTable table = young_q_limit(f, u, mu, q);
        const double rel = table.final_error / table.limit;
        out.add("q-limit two atoms (1, 3) within 2% at q=1024", rel < 0.02, 0.02 - rel);
    }
    Rng rng(seed);
    CheckAggregator agg;
    for (int k = 0; k < 200; ++k) {
        const GridPtr grid = Grid::uniform_1d(0.0, rng.log_uniform(0.1, 10.0), rng.integer(1, 32));
        const DensitySpec f = DensitySpec::weighted_norm(grid, CoefficientProfile::linear(1.0, 0.5));
        std::vector<std::vector<Atom>> atoms(grid->size());
        for (auto& a : atoms) a = random_atoms(rng, 1);
        const DiscreteYoungMeasure mu(grid, std::move(atoms));
        const GridFunction u = GridFunction::constant(grid, 0.0);
        const QLimitTable table = young_q_limit(f, u, mu, default_q_schedule(), true);
        RelationReport r;
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            r.add_leq("q-limit power means nondecreasing", table.rows[i - 1].value, table.rows[i].value, 1e-12);
        r.add_leq("q-limit below ess sup", table.rows.back().value, table.limit, 1e-12);
        agg.add(r, witness_of(seed, k, grid->size()));
    }
    out.merge(agg.summary(""));
    return out;
}

RelationReport density_probe_suite(int trials, std::uint64_t seed) {
    RelationReport out;
    std::uint64_t stream = seed;
    for (const DensitySpec& f : level_convex_families()) {
        RelationReport h1 = level_convexity_probe(f, trials, ++stream);
        for (RelationCheck c : h1.checks()) out.add(f.describe() + ": " + c.name, c.passed, c.slack, c.detail);
        if (f.alpha() > 0.0) {
            RelationReport h2 = growth_check(f, trials, ++stream);
            for (RelationCheck c : h2.checks()) out.add(f.describe() + ": " + c.name, c.passed, c.slack, c.detail);
        }
    }
    return out;
}

RelationReport energy_suite(std::uint64_t seed) {
    Rng rng(seed);
    RelationReport out;
    const GridPtr grid = Grid::uniform_1d(0.0, 1.0, 200);
    const DensitySpec f = DensitySpec::weighted_norm(grid, CoefficientProfile::inv_one_plus_x());
    std::vector<double> uv(grid->size()), dv(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        uv[i] = rng.uniform(-1.0, 1.0);
        dv[i] = rng.uniform(-3.0, 3.0);
    }
    const GridFunction u = GridFunction::scalar(grid, uv);
    const GridFunction du = GridFunction::scalar(grid, dv);

    CheckAggregator agg;
    for (double q : {1.0, 1.5, 2.0, 4.0, 16.0, 64.0}) {
        RelationReport r;
        const double a = eval_Fn(f, u, du, ExponentField::constant(grid, q));
        const double b = lebesgue_norm(density_field(f, u, du), q);
        const double gap = rel_gap(a, b);
        r.add("F_n constant exponent = q-norm of density", gap <= 1e-10, 1e-10 - gap);
        agg.add(r, "q " + std::to_string(q));
    }
    for (double gamma : {0.5, 2.0, 3.0}) {
        RelationReport r;
        const GridPtr g2 = Grid::uniform_1d(0.0, 1.0, 64);
        const auto a = CoefficientProfile::linear(1.0, 2.0);
        const DensitySpec base = DensitySpec::weighted_norm(g2, a);
        const DensitySpec powered = DensitySpec::custom(g2, CustomRule::power_norm, a, gamma, true);
        std::vector<double> d(g2->size());
        for (double& x : d) x = rng.uniform(-2.0, 2.0);
        const GridFunction z = GridFunction::constant(g2, 0.0);
        const GridFunction dz = GridFunction::scalar(g2, d);
        const double lhs = std::pow(eval_supremal(base, z, dz), gamma);
        const double rhs = eval_supremal(powered, z, dz);
        const double gap = rel_gap(lhs, rhs);
        r.add("supremal invariant under monotone rescaling", gap <= 1e-10, 1e-10 - gap);
        agg.add(r, "gamma " + std::to_string(gamma));
    }
    out.merge(agg.summary("energy: "));

    // F_n -> supremal along p_n = n (2 + sin 2 pi x) for a smooth field whose
    // density peaks inside the domain (u = x, Du = sin(pi x)).
    const GridFunction ux = GridFunction::from_function(grid, [](std::span<const double> x) { return x[0]; });
    const GridFunction dux =
        GridFunction::from_function(grid, [](std::span<const double> x) { return std::sin(std::numbers::pi * x[0]); });
    const auto seq = ExponentSequence::scaled_profile(
        grid, [](std::span<const double> x) { return 2.0 + std::sin(2.0 * std::numbers::pi * x[0]); }, 3.0);
    const double sup = eval_supremal(f, ux, dux);
    const double fn = eval_Fn(f, ux, dux, seq(200));
    const double rel = std::abs(fn - sup) / sup;
    out.add("energy: F_n within 1% of supremal at n=200", rel < 0.01, 0.01 - rel);
    return out;
}

std::vector<SuiteSection> run_property_suite(const SuiteOptions& o) {
    using Clock = std::chrono::steady_clock;
    std::vector<SuiteSection> sections;
    auto timed = [&](std::string name, auto&& body) {
        const auto start = Clock::now();
        RelationReport r = body();
        sections.push_back({std::move(name), std::move(r), std::chrono::duration<double>(Clock::now() - start).count()});
    };
    timed("norm_modular", [&] { return norm_modular_suite(o.norm_instances, o.min_cells, o.max_cells, o.seed); });
    timed("holder", [&] { return holder_suite(o.lemma_instances, o.seed + 1); });
    timed("power_identity", [&] { return power_identity_suite(o.lemma_instances, o.seed + 2); });
    timed("embedding", [&] { return embedding_suite(o.lemma_instances, o.seed + 3); });
    timed("jensen", [&] { return jensen_suite(o.jensen_trials, o.seed + 4); });
    timed("q_limit", [&] { return q_limit_suite(o.seed + 100); });
    timed("density_probes", [&] { return density_probe_suite(o.probe_trials, o.seed + 200); });
    timed("energy", [&] { return energy_suite(o.seed + 300); });
    return sections;
}

}  // namespace suplab
