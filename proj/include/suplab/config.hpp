#pragma once

// Run configuration, CSV/manifest emission and the subcommand driver.
//
// Config files are flat INI documents with the sections [density], [mesh],
// [exponents], [solver] and [study]; docs/config.md lists every key.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "suplab/gamma_lab.hpp"

namespace suplab {

/// Invalid configuration; the message starts with the offending key path or
/// with the violated hypothesis label.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParsedConfig {
    StudyConfig study;
    bool kind_given = false;
    bool n_given = false;
    std::uint64_t hash = 0;  // FNV-1a of the document text
};

/// Parses and validates; runs the pn1/pn2, H1 and H2 contract checks.
ParsedConfig parse_config(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double value);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);
    void add_row(std::vector<std::string> cells);
    /// "# config_hash=<hex> seed=<seed>" then the header, then rows.
    [[nodiscard]] std::string render(std::uint64_t config_hash, std::uint64_t seed) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct EmittedFile {
    std::string name;
    std::string hash;  // FNV-1a of the file bytes, hex
};

struct RunManifest {
    std::string subcommand;
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<EmittedFile> files;
    bool passed = true;
    int exit_code = 0;
};

CsvTable study_table(const StudyResult& result);
CsvTable verdict_table(const RelationReport& report);

/// Executes one subcommand and writes its CSVs plus manifest.json to out_dir.
/// Throws ConfigError for unreadable or invalid configurations.
RunManifest run(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::uint64_t seed);

/// The study kind a subcommand runs, honoring an explicit compatible kind.
StudyKind kind_for(const std::string& subcommand, const ParsedConfig& cfg);

}  // namespace suplab
