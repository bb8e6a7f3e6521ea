#pragma once

// Seeded randomized property suite behind `suplab verify`: every norm and
// modular relation, the Lebesgue-space lemmas, Jensen and the q-limit on
// discrete measures, and the H1/H2 probes of the built-in densities.

#include <cstdint>
#include <string>
#include <vector>

#include "suplab/energy.hpp"
#include "suplab/report.hpp"

namespace suplab {

struct SuiteOptions {
    std::uint64_t seed = 1;
    int norm_instances = 1000;
    int min_cells = 16;
    int max_cells = 256;
    int lemma_instances = 200;
    int jensen_trials = 10000;
    int probe_trials = 10000;
};

struct SuiteSection {
    std::string name;
    /// One summary check per property, aggregated over all instances.
    RelationReport report;
    double seconds = 0.0;
};

/// Collapses a per-instance report into one check per distinct name:
/// passed iff every instance passed, slack = minimum slack, detail = first
/// failing instance.
class CheckAggregator {
public:
    void add(const RelationReport& instance, const std::string& witness);
    [[nodiscard]] RelationReport summary(const std::string& prefix) const;

private:
    struct Entry {
        std::string name;
        std::size_t count = 0;
        std::size_t failures = 0;
        double min_slack = 0.0;
        std::string first_failure;
    };
    std::vector<Entry> entries_;
};

RelationReport norm_modular_suite(int instances, int min_cells, int max_cells, std::uint64_t seed);
RelationReport holder_suite(int instances, std::uint64_t seed);
RelationReport power_identity_suite(int instances, std::uint64_t seed);
/// Every fourth instance takes the q = p^- edge.
RelationReport embedding_suite(int instances, std::uint64_t seed);

/// Built-in densities declared level convex, on a 1-D grid of `cells`.
std::vector<DensitySpec> level_convex_families(int cells = 8);
/// a | |xi| - 1 |, the non-level-convex control.
DensitySpec annulus_density(int cells = 8);

/// jensen_check over `trials` random atom sets per family; the annulus
/// control must produce at least one violation.
RelationReport jensen_suite(int trials, std::uint64_t seed);
/// One-cell two-atom q-limit plus power-mean monotonicity on random measures.
RelationReport q_limit_suite(std::uint64_t seed);
/// H1 on every level-convex family, H2 on those with a declared growth bound.
RelationReport density_probe_suite(int trials, std::uint64_t seed);
/// F_n with constant exponent versus the q-norm, supremal rescaling
/// invariance, and F_n -> supremal along the default sequence.
RelationReport energy_suite(std::uint64_t seed);

std::vector<SuiteSection> run_property_suite(const SuiteOptions& options);

}  // namespace suplab
