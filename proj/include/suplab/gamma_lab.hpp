#pragma once

// Convergence studies: minima of F_n against the supremal oracle, the 0/inf
// dichotomy of calF_n, minimizer convergence, and the norm limit.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suplab/discretize.hpp"
#include "suplab/energy.hpp"
#include "suplab/exponent_space.hpp"
#include "suplab/report.hpp"
#include "suplab/solve.hpp"

namespace suplab {

enum class StudyKind { norm_gamma, integral_dichotomy, norm_limit, constant_exponent };

std::string to_string(StudyKind kind);

/// pi(x) in p_n(x) = n pi(x).
struct ExponentProfile {
    enum class Kind { constant, sine };
    Kind kind = Kind::sine;
    double base = 2.0;
    double amplitude = 1.0;

    static ExponentProfile constant(double value = 1.0) { return {Kind::constant, value, 0.0}; }
    static ExponentProfile sine(double base = 2.0, double amplitude = 1.0) { return {Kind::sine, base, amplitude}; }

    /// base + amplitude sin(2 pi x1), or base.
    [[nodiscard]] double operator()(std::span<const double> x) const;
    [[nodiscard]] std::string describe() const;
};

/// Fixed scalar field used by the norm-limit study.
struct ProbeFunction {
    enum class Kind { coordinate, constant, sine };
    Kind kind = Kind::coordinate;
    double scale = 1.0;

    [[nodiscard]] double operator()(std::span<const double> x) const;
    [[nodiscard]] std::string describe() const;
};

struct StudyConfig {
    StudyKind kind = StudyKind::norm_gamma;
    MeshSpec mesh;
    DensitySpec density = DensitySpec::weighted_norm(Grid::uniform_1d(0.0, 1.0, 2), CoefficientProfile{});
    ExponentProfile profile;
    double beta = 3.0;
    std::vector<int> n_values;
    SolverSettings solver;
    double threshold = 0.02;  // final relative error accepted by norm_gamma
    double probe_scale = 0.5;  // dichotomy probe: oracle minimizer rescaled to sup f = probe_scale
    double delta = 0.1;        // dichotomy exclusion band around sup f = 1
    ProbeFunction probe;       // norm_limit field
    int probe_trials = 10000;  // randomized trials per family in verify
    int verify_instances = 1000;  // randomized norm/modular instances in verify

    [[nodiscard]] GridPtr grid() const { return density.grid_ptr(); }
    [[nodiscard]] ExponentSequence sequence() const;
};

std::vector<int> default_n_values(StudyKind kind);

struct StudyRow {
    int n = 0;
    double p_minus = 0.0;
    double p_plus = 0.0;
    /// m_n (norm_gamma), calF_n of the probe (dichotomy), sup-norm distance
    /// to the limit minimizer (minimizers), ||u||_{p_n} (norm_limit).
    double value = 0.0;
    /// L*, sup f of the probe, or ||u||_inf; constant within a study.
    double oracle = 0.0;
    /// |m_n - L*| / L*, the distance itself, or |norm - sup|.
    double error = 0.0;
    double log_value = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool stagnated = false;
};

struct StudyResult {
    StudyKind kind = StudyKind::norm_gamma;
    std::string name;
    std::vector<StudyRow> rows;
    RelationReport verdicts;

    [[nodiscard]] bool passed() const { return verdicts.all_passed(); }
};

/// Last max(2, size/2) entries nonincreasing, up to rel_tol.
bool eventually_nonincreasing(std::span<const double> values, double rel_tol = 1e-12);

/// Supremal limit value for the configured problem: the 1-D oracle or, in
/// 2-D with affine data and constant coefficient, a |slope|.
double limit_oracle(const StudyConfig& cfg);

/// Limit minimizer on the mesh nodes (1-D oracle minimizer or the affine
/// extension in 2-D).
DiscreteField limit_minimizer(const StudyConfig& cfg);

StudyResult run_norm_gamma_study(const StudyConfig& cfg);
StudyResult run_integral_dichotomy_study(const StudyConfig& cfg);
StudyResult run_minimizer_convergence(const StudyConfig& cfg);
StudyResult run_norm_limit_study(const StudyConfig& cfg);

}  // namespace suplab
