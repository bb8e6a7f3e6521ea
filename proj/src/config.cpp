#include "suplab/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include "json.hpp"
#include <set>
#include <sstream>

#include "suplab/errors.hpp"
#include "suplab/property_suite.hpp"

namespace suplab {

namespace {

namespace pt = boost::property_tree;

// Fixed seed for the parse-time H1/H2 probes so validation is reproducible
// independently of the run seed.
constexpr std::uint64_t kContractSeed = 0x5eedULL;
constexpr int kContractTrials = 2000;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"density",
         {"family", "coefficient", "value", "slope", "left", "right", "split", "shift", "axis_weights", "rule",
          "parameter", "level_convex", "scale", "alpha", "gamma", "components"}},
        {"mesh", {"dimension", "lower", "upper", "cells", "boundary", "g0", "g1", "offset", "slope"}},
        {"exponents", {"profile", "base", "amplitude", "beta", "n"}},
        {"solver",
         {"method", "eps_start", "eps_floor", "eps_factor", "initial_step", "shrink", "sufficient_decrease",
          "max_backtracks", "tolerance", "max_iterations"}},
        {"study", {"kind", "threshold", "probe_scale", "delta", "probe", "probe_value", "trials", "instances"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Section {
public:
    Section(std::string name, const pt::ptree* node) : name_(std::move(name)), node_(node) {}

    [[nodiscard]] bool has(const std::string& key) const { return node_ && node_->count(key) > 0; }

    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        return trim(node_->get<std::string>(key));
    }

    [[nodiscard]] double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return parse_number(key, text(key, ""));
    }

    [[nodiscard]] int integer(const std::string& key, int fallback) const {
        const double v = number(key, fallback);
        if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected an integer");
        return static_cast<int>(v);
    }

    [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = text(key, "");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail(key, "expected true or false, got '" + v + "'");
    }

    /// Comma-separated list; a single entry is broadcast to `size` entries.
    [[nodiscard]] std::vector<double> list(const std::string& key, std::vector<double> fallback,
                                           std::size_t size = 0) const {
        std::vector<double> out;
        if (!has(key)) {
            out = std::move(fallback);
        } else {
            std::stringstream ss(text(key, ""));
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
        }
        if (size > 0 && out.size() == 1) out.assign(size, out.front());
        if (size > 0 && out.size() != size)
            fail(key, "expected " + std::to_string(size) + " entries, got " + std::to_string(out.size()));
        return out;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        throw ConfigError(name_ + "." + key + ": " + message);
    }

private:
    double parse_number(const std::string& key, const std::string& raw) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty())
            fail(key, "expected a number, got '" + raw + "'");
        return v;
    }

    std::string name_;
    const pt::ptree* node_;
};

template <typename Enum>
Enum pick(const Section& s, const std::string& key, const std::string& fallback,
          const std::vector<std::pair<std::string, Enum>>& options) {
    const std::string v = s.text(key, fallback);
    for (const auto& [name, value] : options)
        if (name == v) return value;
    std::string known;
    for (const auto& o : options) known += (known.empty() ? "" : ", ") + o.first;
    s.fail(key, "unknown value '" + v + "' (expected one of " + known + ")");
}

MeshSpec parse_mesh(const Section& s) {
    MeshSpec mesh;
    mesh.dimension = s.integer("dimension", 1);
    if (mesh.dimension != 1 && mesh.dimension != 2) s.fail("dimension", "must be 1 or 2");
    const auto dim = static_cast<std::size_t>(mesh.dimension);
    mesh.lower = s.list("lower", {0.0}, dim);
    mesh.upper = s.list("upper", {1.0}, dim);
    const auto cells = s.list("cells", {64.0}, dim);
    mesh.cells.clear();
    for (double c : cells) {
        if (c != std::floor(c) || c < 2 || c > 1e7) s.fail("cells", "expected integers >= 2");
        mesh.cells.push_back(static_cast<int>(c));
    }
    for (std::size_t a = 0; a < dim; ++a)
        if (!(mesh.upper[a] > mesh.lower[a])) s.fail("upper", "must exceed lower on every axis");

    const std::string kind = s.text("boundary", mesh.dimension == 1 ? "endpoints" : "affine");
    if (kind == "endpoints") {
        if (mesh.dimension != 1) s.fail("boundary", "endpoints data is 1-D only");
        mesh.boundary = BoundaryTrace::endpoints(mesh.lower[0], mesh.upper[0], s.number("g0", 0.0), s.number("g1", 1.0));
    } else if (kind == "affine") {
        mesh.boundary = BoundaryTrace::affine(s.number("offset", 0.0), s.list("slope", {1.0}, dim));
    } else {
        s.fail("boundary", "unknown value '" + kind + "' (expected endpoints, affine)");
    }
    try {
        mesh.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("mesh: ") + e.what());
    }
    return mesh;
}

CoefficientProfile parse_coefficient(const Section& s) {
    const auto kind = pick<CoefficientProfile::Kind>(s, "coefficient", "constant",
                                                     {{"constant", CoefficientProfile::Kind::constant},
                                                      {"inv_one_plus_x", CoefficientProfile::Kind::inv_one_plus_x},
                                                      {"piecewise", CoefficientProfile::Kind::piecewise},
                                                      {"linear", CoefficientProfile::Kind::linear}});
    CoefficientProfile a;
    a.kind = kind;
    a.value = s.number("value", 1.0);
    a.slope = s.number("slope", 0.0);
    a.left = s.number("left", 1.0);
    a.right = s.number("right", 1.0);
    a.split = s.number("split", 0.5);
    return a;
}

DensitySpec parse_density(const Section& s, const GridPtr& grid) {
    const auto family = pick<DensityFamily>(s, "family", "weighted_norm",
                                            {{"weighted_norm", DensityFamily::weighted_norm},
                                             {"shifted_norm", DensityFamily::shifted_norm},
                                             {"anisotropic", DensityFamily::anisotropic},
                                             {"custom", DensityFamily::custom}});
    const int comps = s.integer("components", 1);
    if (comps < 1) s.fail("components", "must be positive");
    const auto xi_dim = static_cast<std::size_t>(grid->dimension() * comps);
    const CoefficientProfile a = parse_coefficient(s);
    try {
        std::optional<DensitySpec> f;
        switch (family) {
            case DensityFamily::weighted_norm: f = DensitySpec::weighted_norm(grid, a, comps); break;
            case DensityFamily::shifted_norm: f = DensitySpec::shifted_norm(grid, s.list("shift", {0.0}, xi_dim), comps); break;
            case DensityFamily::anisotropic:
                f = DensitySpec::anisotropic(grid, a, s.list("axis_weights", {1.0}, xi_dim), comps);
                break;
            case DensityFamily::custom: {
                const auto rule = pick<CustomRule>(s, "rule", "capped_norm",
                                                   {{"capped_norm", CustomRule::capped_norm},
                                                    {"annulus", CustomRule::annulus},
                                                    {"power_norm", CustomRule::power_norm}});
                f = DensitySpec::custom(grid, rule, a, s.number("parameter", 1.0), s.flag("level_convex", true), comps);
                break;
            }
        }
        const double alpha = s.number("alpha", 0.0);
        if (alpha < 0.0) s.fail("alpha", "must be nonnegative");
        if (alpha > 0.0) f->with_growth(alpha, s.number("gamma", 1.0));
        const double scale = s.number("scale", 1.0);
        if (!(scale > 0.0)) s.fail("scale", "must be positive");
        return scale == 1.0 ? *f : f->scaled(scale);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("density: ") + e.what());
    }
}

ExponentProfile parse_profile(const Section& s) {
    ExponentProfile profile;
    profile.kind = pick<ExponentProfile::Kind>(s, "profile", "sine",
                                               {{"sine", ExponentProfile::Kind::sine},
                                                {"constant", ExponentProfile::Kind::constant}});
    profile.base = s.number("base", profile.kind == ExponentProfile::Kind::constant ? 1.0 : 2.0);
    profile.amplitude = profile.kind == ExponentProfile::Kind::constant ? 0.0 : s.number("amplitude", 1.0);
    if (s.has("amplitude") && profile.kind == ExponentProfile::Kind::constant)
        s.fail("amplitude", "only meaningful for the sine profile");
    if (!(profile.base - std::abs(profile.amplitude) > 0.0))
        s.fail("base", "profile must stay positive (base > |amplitude|)");
    return profile;
}

SolverSettings parse_solver(const Section& s) {
    SolverSettings out;
    out.method = pick<DescentMethod>(s, "method", "newton",
                                     {{"newton", DescentMethod::newton}, {"steepest", DescentMethod::steepest}});
    const double start = s.number("eps_start", 1e-1);
    const double floor = s.number("eps_floor", 1e-6);
    const double factor = s.number("eps_factor", 0.1);
    if (!(start > 0.0 && floor > 0.0 && floor <= start)) s.fail("eps_floor", "need 0 < eps_floor <= eps_start");
    if (!(factor > 0.0 && factor < 1.0)) s.fail("eps_factor", "must lie in (0, 1)");
    out.epsilons = SolverSettings::geometric_epsilons(start, floor, factor);
    out.initial_step = s.number("initial_step", out.initial_step);
    out.shrink = s.number("shrink", out.shrink);
    out.sufficient_decrease = s.number("sufficient_decrease", out.sufficient_decrease);
    out.max_backtracks = s.integer("max_backtracks", out.max_backtracks);
    out.tolerance = s.number("tolerance", out.tolerance);
    out.max_iterations = s.integer("max_iterations", out.max_iterations);
    if (!(out.initial_step > 0.0)) s.fail("initial_step", "must be positive");
    if (out.max_iterations < 1) s.fail("max_iterations", "must be positive");
    if (out.max_backtracks < 1) s.fail("max_backtracks", "must be positive");
    try {
        out.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    return out;
}

void check_schedule(const StudyConfig& cfg) {
    try {
        const RelationReport conditions = cfg.sequence().check_conditions(cfg.n_values);
        for (const RelationCheck& c : conditions.checks()) {
            if (!c.passed) throw ConfigError("exponents.n: " + c.name + " violated (slack " + format_number(c.slack) + ")");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("exponents: ") + e.what());
    }
}

void check_density_contract(const DensitySpec& f) {
    if (!f.level_convex()) throw ConfigError("density.level_convex: H1 level convexity is required by every study");
    const RelationReport h1 = level_convexity_probe(f, kContractTrials, kContractSeed);
    if (!h1.all_passed()) {
        const RelationCheck c = h1.failed().front();
        throw ConfigError("density: H1 level convexity violated; witness " + c.detail);
    }
    if (f.alpha() > 0.0) {
        const RelationReport h2 = growth_check(f, kContractTrials, kContractSeed + 1);
        if (!h2.all_passed()) {
            const RelationCheck c = h2.failed().front();
            throw ConfigError("density.alpha: H2 growth violated; witness " + c.detail);
        }
    }
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, ptr};
}

ParsedConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, node] : tree) {
        const auto it = schema().find(section);
        if (node.empty() && !node.data().empty()) throw ConfigError("unknown key '" + section + "' outside any section");
        if (it == schema().end()) throw ConfigError("unknown section '[" + section + "]'");
        for (const auto& [key, value] : node) {
            if (!it->second.contains(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
        }
    }
    auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return Section(name, child ? &*child : nullptr);
    };

    const Section study = section("study");
    const Section exps = section("exponents");
    ParsedConfig out;
    out.hash = fnv1a64(text);
    out.study.mesh = parse_mesh(section("mesh"));
    StudyConfig& cfg = out.study;
    const GridPtr grid = Grid::uniform(cfg.mesh.lower, cfg.mesh.upper, cfg.mesh.cells);
    cfg.density = parse_density(section("density"), grid);

    out.kind_given = study.has("kind");
    cfg.kind = pick<StudyKind>(study, "kind", "norm_gamma",
                               {{"norm_gamma", StudyKind::norm_gamma},
                                {"integral_dichotomy", StudyKind::integral_dichotomy},
                                {"norm_limit", StudyKind::norm_limit},
                                {"constant_exponent", StudyKind::constant_exponent}});
    cfg.threshold = study.number("threshold", cfg.threshold);
    cfg.probe_scale = study.number("probe_scale", cfg.probe_scale);
    cfg.delta = study.number("delta", cfg.delta);
    cfg.probe.kind = pick<ProbeFunction::Kind>(study, "probe", "coordinate",
                                               {{"coordinate", ProbeFunction::Kind::coordinate},
                                                {"constant", ProbeFunction::Kind::constant},
                                                {"sine", ProbeFunction::Kind::sine}});
    cfg.probe.scale = study.number("probe_value", 1.0);
    cfg.probe_trials = study.integer("trials", cfg.probe_trials);
    cfg.verify_instances = study.integer("instances", cfg.verify_instances);
    if (!(cfg.threshold > 0.0)) study.fail("threshold", "must be positive");
    if (!(cfg.probe_scale > 0.0)) study.fail("probe_scale", "must be positive");
    if (!(cfg.delta >= 0.0)) study.fail("delta", "must be nonnegative");
    if (cfg.probe_trials < 1) study.fail("trials", "must be positive");
    if (cfg.verify_instances < 1) study.fail("instances", "must be positive");

    cfg.profile = parse_profile(exps);
    cfg.beta = exps.number("beta", cfg.beta);
    if (!(cfg.beta > 1.0)) exps.fail("beta", "pn2 requires beta > 1, got " + format_number(cfg.beta));
    out.n_given = exps.has("n");
    if (out.n_given) {
        for (double n : exps.list("n", {})) {
            if (n != std::floor(n) || n < 1 || n > 1e6) exps.fail("n", "expected positive integers");
            cfg.n_values.push_back(static_cast<int>(n));
        }
        if (!std::is_sorted(cfg.n_values.begin(), cfg.n_values.end()))
            exps.fail("n", "pn1 requires an increasing schedule");
    } else {
        cfg.n_values = default_n_values(cfg.kind);
    }
    cfg.solver = parse_solver(section("solver"));

    check_schedule(cfg);
    check_density_contract(cfg.density);
    return out;
}

StudyKind kind_for(const std::string& subcommand, const ParsedConfig& cfg) {
    auto require = [&](std::initializer_list<StudyKind> allowed) {
        const StudyKind k = *allowed.begin();
        if (!cfg.kind_given) return k;
        for (StudyKind a : allowed)
            if (a == cfg.study.kind) return a;
        throw ConfigError("study.kind: " + to_string(cfg.study.kind) + " is incompatible with subcommand " + subcommand);
    };
    if (subcommand == "verify") return cfg.study.kind;
    if (subcommand == "norms") return require({StudyKind::norm_limit});
    if (subcommand == "gamma-study") return require({StudyKind::norm_gamma, StudyKind::constant_exponent});
    if (subcommand == "dichotomy") return require({StudyKind::integral_dichotomy});
    if (subcommand == "minimizers") return require({StudyKind::constant_exponent});
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw StructuralError("CsvTable: row width mismatch");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render(std::uint64_t config_hash, std::uint64_t seed) const {
    std::string out = "# config_hash=" + hex64(config_hash) + " seed=" + std::to_string(seed) + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(cells[i]);
        }
        out += '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CsvTable study_table(const StudyResult& result) {
    CsvTable t({"n", "p_minus", "p_plus", "value", "oracle", "error", "log_value", "lower_bound", "upper_bound",
                "iterations", "residual", "stagnated"});
    for (const StudyRow& r : result.rows) {
        t.add_row({std::to_string(r.n), format_number(r.p_minus), format_number(r.p_plus), format_number(r.value),
                   format_number(r.oracle), format_number(r.error), format_number(r.log_value),
                   format_number(r.lower_bound), format_number(r.upper_bound), std::to_string(r.iterations),
                   format_number(r.residual), r.stagnated ? "1" : "0"});
    }
    return t;
}

CsvTable verdict_table(const RelationReport& report) {
    CsvTable t({"check", "passed", "slack", "detail"});
    for (const RelationCheck& c : report.checks())
        t.add_row({c.name, c.passed ? "1" : "0", format_number(c.slack), c.detail});
    return t;
}

RunManifest run(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::uint64_t seed) {
    const std::string text = read_file(config_path);
    ParsedConfig parsed = parse_config(text);
    StudyConfig& cfg = parsed.study;
    cfg.kind = kind_for(subcommand, parsed);
    if (!parsed.n_given) {
        cfg.n_values = default_n_values(cfg.kind);
        check_schedule(cfg);
    }

    RunManifest manifest;
    manifest.subcommand = subcommand;
    manifest.config_path = config_path;
    manifest.out_dir = out_dir;
    manifest.seed = seed;
    manifest.config_hash = hex64(parsed.hash);

    std::vector<std::pair<std::string, std::string>> outputs;
    if (subcommand == "verify") {
        SuiteOptions options;
        options.seed = seed;
        options.norm_instances = cfg.verify_instances;
        options.jensen_trials = cfg.probe_trials;
        options.probe_trials = cfg.probe_trials;
        CsvTable t({"section", "check", "passed", "slack", "detail"});
        for (const SuiteSection& s : run_property_suite(options)) {
            for (const RelationCheck& c : s.report.checks())
                t.add_row({s.name, c.name, c.passed ? "1" : "0", format_number(c.slack), c.detail});
            manifest.passed = manifest.passed && s.report.all_passed();
        }
        // The configured density's own contracts (already enforced at parse time).
        CsvTable contracts = verdict_table([&] {
            RelationReport r = level_convexity_probe(cfg.density, cfg.probe_trials, seed);
            if (cfg.density.alpha() > 0.0) r.merge(growth_check(cfg.density, cfg.probe_trials, seed + 1));
            r.merge(cfg.sequence().check_conditions(cfg.n_values));
            manifest.passed = manifest.passed && r.all_passed();
            return r;
        }());
        outputs.emplace_back("verify.csv", t.render(parsed.hash, seed));
        outputs.emplace_back("verify_config_contracts.csv", contracts.render(parsed.hash, seed));
    } else {
        StudyResult result;
        std::string stem;
        try {
            if (subcommand == "norms") {
                result = run_norm_limit_study(cfg);
                stem = "norm_limit";
            } else if (subcommand == "gamma-study") {
                result = run_norm_gamma_study(cfg);
                stem = "gamma_study";
            } else if (subcommand == "dichotomy") {
                result = run_integral_dichotomy_study(cfg);
                stem = "dichotomy";
            } else {
                result = run_minimizer_convergence(cfg);
                stem = "minimizers";
            }
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("study: ") + e.what());
        }
        manifest.passed = result.passed();
        outputs.emplace_back(stem + ".csv", study_table(result).render(parsed.hash, seed));
        outputs.emplace_back(stem + "_verdicts.csv", verdict_table(result.verdicts).render(parsed.hash, seed));
    }

    std::filesystem::create_directories(out_dir);
    for (const auto& [name, content] : outputs) {
        write_atomic(out_dir / name, content);
        manifest.files.push_back({name, hex64(fnv1a64(content))});
    }
    manifest.exit_code = manifest.passed ? 0 : 1;

    nlohmann::json j;
    j["subcommand"] = manifest.subcommand;
    j["config_path"] = manifest.config_path.string();
    j["out_dir"] = manifest.out_dir.string();
    j["seed"] = manifest.seed;
    j["config_hash"] = manifest.config_hash;
    j["passed"] = manifest.passed;
    j["exit_code"] = manifest.exit_code;
    j["files"] = nlohmann::json::array();
    for (const EmittedFile& f : manifest.files) j["files"].push_back({{"name", f.name}, {"fnv1a64", f.hash}});
    write_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
    return manifest;
}

}  // namespace suplab
