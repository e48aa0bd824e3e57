#include "acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

// Usage: nuhawkes_acceptance [output_dir] [threads] [seed]
int main(int argc, char** argv) {
    nuhawkes::cli::AcceptanceOptions options;
    options.output = argc > 1 ? argv[1] : "acceptance_artifacts";
    options.threads = argc > 2 ? static_cast<unsigned>(std::stoul(argv[2])) : 1u;
    if (argc > 3) {
        options.seed = std::stoull(argv[3]);
    }
    options.on_result = [](const nuhawkes::cli::CriterionResult& r) {
        std::printf("%s\n", nuhawkes::cli::format_result_line(r).c_str());
        std::fflush(stdout);
    };
    try {
        const auto result = nuhawkes::cli::run_acceptance(options);
        std::size_t passed = 0;
        for (const auto& c : result.criteria) {
            passed += c.pass ? 1 : 0;
        }
        std::printf("%zu/%zu acceptance criteria passed\n", passed, result.criteria.size());
        return result.all_pass() ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance run failed: %s\n", e.what());
        return 2;
    }
}
