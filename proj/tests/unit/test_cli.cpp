#include "acceptance.hpp"
#include "artifacts.hpp"
#include "config.hpp"
#include "kernel_json.hpp"
#include "runner.hpp"

#include "nuhawkes/errors.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace nuhawkes;
using namespace nuhawkes::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("NUHAWKES_TEST_TMP");
    const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "nuhawkes_test_cli";
    const fs::path dir = root / name;
    fs::remove_all(dir);
    fs::create_directories(root);
    return dir;
}

std::vector<std::string> errors_of(const std::string& text) {
    try {
        (void)validate_config(text);
    } catch (const ConfigValidationError& e) {
        return e.errors();
    }
    return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    for (const auto& e : errors) {
        if (e.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* exp_kernel = R"({"form": "exponential", "params": {"alpha": 0.5, "beta": 1}})";

std::string resolvent_config(const std::string& out) {
    return std::string(R"({"kind": "resolvent", "seed": 3, "grid": {"T": 2, "h": 0.01}, "output": ")") + out +
           R"(", "kernel": {"form": "exponential", "params": {"alpha": 1, "beta": 2}}})";
}

} // namespace

TEST_CASE("defaults are applied") {
    const auto c = validate_config(std::string(R"({"kind": "hawkes", "seed": 1, "kernel": )") + exp_kernel + "}");
    CHECK(c.kind == ExperimentKind::hawkes);
    CHECK(c.step == Approx(1e-3));
    CHECK(c.horizon == Approx(1.0));
    CHECK(c.paths == 10000);
    CHECK(c.hawkes.method == "thinning");
    CHECK(c.normalized["grid"]["h"].get<double>() == Approx(1e-3));
    CHECK_FALSE(c.normalized.contains("output"));
    CHECK_FALSE(c.normalized.contains("threads"));
    CHECK(c.resolved_kernel().l1()(0, 0) == Approx(0.5));
}

TEST_CASE("validation errors name their keys") {
    const std::string base = std::string(R"("kind": "hawkes", "seed": 1, "kernel": )") + exp_kernel;
    CHECK(mentions(errors_of("{" + base + R"(, "grid": {"h": -0.1}})"), "grid.h"));
    CHECK(mentions(errors_of("{" + base + R"(, "grid": {"T": 0}})"), "grid.T"));
    CHECK(mentions(errors_of("{" + base + R"(, "bogus": 1})"), "bogus"));
    CHECK(mentions(errors_of("{" + base + R"(, "grid": {"H": 0.1}})"), "grid.H"));
    CHECK(mentions(errors_of(R"({"kind": "hawkes", "kernel": )" + std::string(exp_kernel) + "}"), "seed"));
    CHECK(mentions(errors_of(R"({"kind": "nope", "seed": 1})"), "kind"));
    CHECK_FALSE(errors_of("{ not json").empty());

    const auto k_gt_n = errors_of(std::string(R"({"kind": "meanfield", "seed": 1, "kernel": )") + exp_kernel +
                                  R"(, "meanfield": {"n": [3], "K": 5}})");
    CHECK(mentions(k_gt_n, "meanfield.K"));
    CHECK(mentions(k_gt_n, "meanfield.n"));

    // every problem is reported at once
    const auto many = errors_of("{" + base + R"(, "grid": {"h": 0, "T": -1}, "paths": 0})");
    CHECK(many.size() >= 3);

    CHECK(mentions(errors_of(R"({"kind": "resolvent", "seed": 1})"), "kernel"));
    CHECK(mentions(errors_of(R"({"kind": "resolvent", "seed": 1, "kernel": {"form": "exponential", "params": {"alpha": -1, "beta": 1}}})"),
                   "kernel"));
    CHECK(mentions(errors_of(R"({"kind": "regime-compare", "seed": 1, "family": {"base": {"form": "power_law", "params": {"scale": 1, "exponent": 0.5}}, "c": 2}})"),
                   "family.base"));
}

TEST_CASE("kernel JSON round trip") {
    Matrix alpha(2, 2);
    alpha << 0.3, 0.2, 0.1, 0.4;
    for (const auto& k : {Kernel::exponential(alpha, Matrix::Constant(2, 2, 2.0)), Kernel::power_law(0.5, 0.6, 2.0),
                          Kernel::power_law(1.0, 0.5, std::numeric_limits<double>::infinity()), Kernel::zero(3),
                          Kernel::grid_sampled(0.5, {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.0)})}) {
        const auto back = kernel_from_json(kernel_to_json(k));
        CHECK(back.dimension() == k.dimension());
        CHECK(back.eval(0.3).isApprox(k.eval(0.3)));
        CHECK(kernel_to_json(back) == kernel_to_json(k));
    }
    CHECK_THROWS_AS((void)kernel_from_json(nlohmann::json::parse(R"({"form": "gaussian", "params": {}})")), ConfigError);
    CHECK_THROWS_AS((void)kernel_from_json(nlohmann::json::parse(R"({"form": "exponential", "params": {"alpha": 1}})")),
                    ConfigError);
}

TEST_CASE("artifact helpers") {
    CHECK(sha256_text("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_text("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");

    const auto dir = scratch("csv");
    {
        CsvWriter csv(dir / "nested" / "t.csv", {"a", "b"});
        csv.row({1.0, 0.5});
        csv.row("x", {2.0});
    }
    const auto text = read_file(dir / "nested" / "t.csv");
    CHECK(text == "a,b\n1,0.5\nx,2\n");
    CHECK(sha256_file(dir / "nested" / "t.csv") == sha256_text(text));
    const auto listing = artifact_listing(dir);
    REQUIRE(listing.size() == 1);
    CHECK(listing[0]["file"] == "nested/t.csv");
    CHECK(listing[0]["bytes"] == text.size());
}

TEST_CASE("resolvent run writes a complete manifest") {
    const auto dir = scratch("resolvent_run");
    const auto config = validate_config(resolvent_config(dir.string()));
    const auto summary = run_experiment(config);
    CHECK(summary.pass);
    CHECK(summary.directory == dir);

    const auto header = read_file(dir / "resolvent_error.csv").substr(0, 40);
    CHECK(header.find("max_error") != std::string::npos);

    const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    CHECK(manifest == summary.manifest);
    for (const char* key : {"schema_version", "tool", "kind", "seed", "config_hash", "config", "versions", "derived",
                            "artifacts", "reports", "pass"}) {
        CHECK_MESSAGE(manifest.contains(key), key);
    }
    CHECK(manifest["kind"] == "resolvent");
    CHECK(manifest["config_hash"] == sha256_text(config.normalized.dump()));
    CHECK(manifest["versions"].contains("nuhawkes"));
    std::size_t listed = 0;
    for (const auto& a : manifest["artifacts"]) {
        const fs::path file = dir / a["file"].get<std::string>();
        REQUIRE(fs::exists(file));
        CHECK(a["sha256"] == sha256_file(file));
        CHECK(a["bytes"] == fs::file_size(file));
        ++listed;
    }
    // every file except the manifest itself
    std::size_t on_disk = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        on_disk += e.is_regular_file() ? 1 : 0;
    }
    CHECK(listed + 1 == on_disk);
    CHECK(fs::exists(dir / "reports.jsonl"));
}

TEST_CASE("run directories are only replaced when they hold a manifest") {
    const auto dir = scratch("guarded");
    fs::create_directories(dir);
    std::ofstream(dir / "precious.txt") << "keep";
    CHECK_THROWS((void)run_experiment(validate_config(resolvent_config(dir.string()))));
    CHECK(fs::exists(dir / "precious.txt"));

    const auto again = scratch("rerun");
    (void)run_experiment(validate_config(resolvent_config(again.string())));
    CHECK_NOTHROW((void)run_experiment(validate_config(resolvent_config(again.string()))));
}

TEST_CASE("runs are byte-identical across repeats and thread counts") {
    auto text = [](const fs::path& out) {
        return std::string(R"({"kind": "hawkes", "seed": 99, "paths": 300, "grid": {"T": 2, "h": 0.01}, "output": ")") +
               out.string() + R"(", "kernel": {"form": "power_law", "params": {"scale": 0.5, "exponent": 0.7}}, "hawkes": {"export_paths": 2}})";
    };
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto ca = validate_config(text(a));
    const auto cb = validate_config(text(b));
    CHECK(ca.normalized == cb.normalized);
    RunOptions one;
    one.threads = 1;
    RunOptions three;
    three.threads = 3;
    const auto sa = run_experiment(ca, one);
    const auto sb = run_experiment(cb, three);
    CHECK(sa.manifest["artifacts"] == sb.manifest["artifacts"]);
    CHECK(sa.manifest["config_hash"] == sb.manifest["config_hash"]);
    CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));
    CHECK(sa.manifest["artifacts"].size() >= 4);
}

TEST_CASE("acceptance subset") {
    AcceptanceOptions options;
    options.output = scratch("acceptance");
    options.only = {1, 2, 12};
    int seen = 0;
    options.on_result = [&](const CriterionResult&) { ++seen; };
    const auto result = run_acceptance(options);
    REQUIRE(result.criteria.size() == 3);
    CHECK(seen == 3);
    CHECK(result.all_pass());
    const auto line = format_result_line(result.criteria.front());
    CHECK(line.rfind("[PASS] 01 ", 0) == 0);
    CHECK(fs::exists(options.output / "c01_resolvent"));
}
