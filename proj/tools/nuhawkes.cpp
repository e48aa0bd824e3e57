#include "config.hpp"
#include "runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nuhawkes::cli::json;

// exit codes: 0 all checks pass, 1 a check failed, 2 bad usage or config, 3 runtime failure
constexpr int exit_checks_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& kind, const Flags& flags) {
    json doc = json::object();
    if (!flags.config.empty()) {
        try {
            doc = json::parse(read_file(flags.config));
        } catch (const json::parse_error& e) {
            std::cerr << "invalid config: <document>: not valid JSON: " << e.what() << '\n';
            return exit_config;
        }
    } else if (kind != "acceptance-suite") {
        std::cerr << "--config is required for this subcommand\n";
        return exit_config;
    }
    if (doc.is_object()) {
        if (!doc.contains("kind")) {
            doc["kind"] = kind;
        } else if (doc["kind"] != kind) {
            std::cerr << "invalid config:\n  kind: subcommand expects \"" << kind << "\", config says "
                      << doc["kind"].dump() << '\n';
            return exit_config;
        }
        if (flags.seed) {
            doc["seed"] = *flags.seed;
        } else if (!doc.contains("seed") && kind == "acceptance-suite") {
            doc["seed"] = 20241019ULL;
        }
    }

    nuhawkes::cli::ExperimentConfig config;
    try {
        config = nuhawkes::cli::validate_config(doc.dump());
    } catch (const nuhawkes::cli::ConfigValidationError& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
    if (!flags.out.empty()) {
        config.output = flags.out;
    }
    if (flags.threads > 0) {
        config.threads = flags.threads;
    }

    nuhawkes::cli::RunOptions options;
    options.threads = config.threads;
    options.log = [](const std::string& line) { std::cout << line << std::endl; };
    try {
        const auto summary = nuhawkes::cli::run_experiment(config, options);
        std::size_t failed = 0;
        for (const auto& r : summary.reports) {
            if (!r.pass) {
                ++failed;
                std::cout << "check failed: " << r.name << " (" << r.description << "), statistic "
                          << r.statistic << ", threshold " << r.threshold << '\n';
            }
        }
        std::cout << "run directory: " << summary.directory.string() << '\n'
                  << summary.reports.size() - failed << "/" << summary.reports.size() << " checks passed\n";
        return summary.pass ? 0 : exit_checks_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nearly unstable Hawkes processes: simulation, resolvents, scaling limits and checks"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;

    const std::map<std::string, std::pair<std::string, std::string>> commands = {
        {"simulate", {"hawkes", "Simulate Hawkes paths (thinning or cluster) with mean-identity checks"}},
        {"resolvent", {"resolvent", "Tabulate the resolvent psi and check it against transforms"}},
        {"meanfield", {"meanfield", "Simulate mean-field particle systems and their rescalings"}},
        {"limit", {"limit", "Solve the CIR or stochastic Volterra limit equations"}},
        {"compare", {"regime-compare", "Compare particle empirical measures with their regime limits"}},
        {"accept", {"acceptance-suite", "Run the acceptance criteria"}},
    };
    std::string chosen;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", flags.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Root RNG seed (unsigned 64-bit), overrides the config");
        sub->add_option("--out", flags.out, "Run directory, overrides the config");
        sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->callback([&chosen, kind = entry.first] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }
    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--seed") > 0) {
            flags.seed = seed;
        }
    }
    return run(chosen, flags);
}
