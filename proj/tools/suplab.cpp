// suplab <subcommand> --config <path> --out <dir> [--seed <u64>]

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "suplab/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Variable-exponent norms and supremal-limit studies"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    const std::pair<const char*, const char*> commands[] = {
        {"verify", "randomized property suite"},
        {"norms", "norm limit as the exponent grows"},
        {"gamma-study", "minima of F_n against the supremal oracle"},
        {"dichotomy", "0/inf behaviour of the integral functionals"},
        {"minimizers", "convergence of finite-n minimizers"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--seed", seed, "random seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        const suplab::RunManifest m = suplab::run(subcommand, config, out, seed);
        for (const auto& f : m.files) std::cout << (m.out_dir / f.name).string() << "  " << f.hash << '\n';
        std::cout << subcommand << ": " << (m.passed ? "all verdicts passed" : "verdict failures") << '\n';
        return m.exit_code;
    } catch (const suplab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
