#include "config.hpp"
#include "kernel_json.hpp"
#include "runner.hpp"

#include "nuhawkes/hawkes.hpp"
#include "nuhawkes/limits.hpp"
#include "nuhawkes/resolvent.hpp"
#include "nuhawkes/stats.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#ifndef NUHAWKES_VERSION
#define NUHAWKES_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace nuhawkes;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

py::dict report_dict(const TestReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["description"] = r.description;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value ? py::cast(*r.p_value) : py::none();
    d["threshold"] = r.threshold;
    d["size_a"] = r.size_a;
    d["size_b"] = r.size_b;
    d["passed"] = r.pass;
    return d;
}

// stack of d x d matrices as an (m, d, d) array
py::array_t<double> stack(const std::vector<Matrix>& ms) {
    const auto d = ms.empty() ? 0 : static_cast<py::ssize_t>(ms.front().rows());
    py::array_t<double> out({static_cast<py::ssize_t>(ms.size()), d, d});
    auto v = out.mutable_unchecked<3>();
    for (py::ssize_t k = 0; k < static_cast<py::ssize_t>(ms.size()); ++k) {
        for (py::ssize_t i = 0; i < d; ++i) {
            for (py::ssize_t j = 0; j < d; ++j) {
                v(k, i, j) = ms[static_cast<std::size_t>(k)](i, j);
            }
        }
    }
    return out;
}

py::tuple path_tuple(const HawkesPath& p) {
    py::array_t<double> times(static_cast<py::ssize_t>(p.times.size()), p.times.data());
    py::array_t<std::uint32_t> comps(static_cast<py::ssize_t>(p.components.size()), p.components.data());
    return py::make_tuple(times, comps);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nearly unstable Hawkes processes: simulation, resolvents and scaling limits";
    m.attr("__version__") = NUHAWKES_VERSION;

    py::class_<Kernel>(m, "Kernel")
        .def_static("exponential", py::overload_cast<double, double>(&Kernel::exponential), py::arg("alpha"),
                    py::arg("beta"))
        .def_static("exponential", py::overload_cast<Matrix, Matrix>(&Kernel::exponential), py::arg("alpha"),
                    py::arg("beta"))
        .def_static("power_law", py::overload_cast<double, double, double>(&Kernel::power_law), py::arg("scale"),
                    py::arg("exponent"), py::arg("cutoff") = 1.0)
        .def_static("power_law", py::overload_cast<Matrix, double, double>(&Kernel::power_law), py::arg("scale"),
                    py::arg("exponent"), py::arg("cutoff") = 1.0)
        .def_static("zero", &Kernel::zero, py::arg("dimension") = 1)
        .def_static("from_json", [](const std::string& text) { return cli::kernel_from_json(nlohmann::json::parse(text)); })
        .def("to_json", [](const Kernel& k) { return cli::kernel_to_json(k).dump(); })
        .def_property_readonly("dimension", &Kernel::dimension)
        .def("eval", &Kernel::eval, py::arg("t"))
        .def("l1", &Kernel::l1)
        .def("laplace", &Kernel::laplace, py::arg("z"))
        .def("integrable", &Kernel::integrable)
        .def("nonincreasing", &Kernel::nonincreasing);

    m.def("stability", [](const Kernel& k) {
        const auto s = l1_and_stability(k);
        py::dict d;
        d["l1"] = s.l1;
        d["spectral_radius"] = s.spectral_radius;
        d["stable"] = s.stable;
        return d;
    });

    m.def(
        "resolvent_grid",
        [](const Kernel& k, double horizon, double step) {
            ResolventTable t;
            {
                py::gil_scoped_release release;
                t = resolvent_grid(k, Grid(horizon, step));
            }
            std::vector<double> mids(t.grid.cells());
            for (std::size_t i = 0; i < mids.size(); ++i) {
                mids[i] = t.grid.midpoint(i);
            }
            py::dict d;
            d["t_mid"] = py::array_t<double>(static_cast<py::ssize_t>(mids.size()), mids.data());
            d["psi"] = stack(t.psi);
            d["cumulative"] = stack(t.cumulative);
            d["warnings"] = t.warnings;
            return d;
        },
        py::arg("kernel"), py::arg("horizon"), py::arg("step") = 1e-3,
        "Resolvent cells psi (m, d, d) and node cumulative norms (m + 1, d, d).");

    auto simulate = [](bool cluster) {
        return [cluster](const Vector& mu, const Kernel& k, double horizon, std::uint64_t seed, std::uint64_t index) {
            HawkesPath p;
            {
                py::gil_scoped_release release;
                const HawkesParams params{mu, k, horizon};
                p = cluster ? simulate_cluster(params, seed, index) : simulate_thinning(params, seed, index);
            }
            return path_tuple(p);
        };
    };
    m.def("simulate_thinning", simulate(false), py::arg("mu"), py::arg("kernel"), py::arg("horizon"), py::arg("seed"),
          py::arg("path_index") = 0, "Event times and components of one thinning path.");
    m.def("simulate_cluster", simulate(true), py::arg("mu"), py::arg("kernel"), py::arg("horizon"), py::arg("seed"),
          py::arg("path_index") = 0, "Event times and components of one cluster-representation path.");

    m.def(
        "solve_cir",
        [](double b, double a, double sigma, double xi0, double horizon, double step, std::uint64_t seed,
           std::uint64_t index) {
            CIRPath p;
            {
                py::gil_scoped_release release;
                p = solve_cir(CIRParams{b, a, sigma, xi0}, Grid(horizon, step), seed, index);
            }
            const auto t = p.grid.node_times();
            return py::make_tuple(py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data()), Vector(p.values));
        },
        py::arg("b"), py::arg("a"), py::arg("sigma"), py::arg("xi0") = 0.0, py::arg("horizon") = 1.0,
        py::arg("step") = 1e-3, py::arg("seed") = 0, py::arg("path_index") = 0);

    m.def(
        "ks_distance", [](std::vector<double> a, std::vector<double> b, double level) {
            return report_dict(ks_distance(std::move(a), std::move(b), level));
        },
        py::arg("a"), py::arg("b"), py::arg("level") = 0.01);
    m.def(
        "wasserstein1", [](std::vector<double> a, std::vector<double> b) {
            return report_dict(wasserstein1(std::move(a), std::move(b)));
        },
        py::arg("a"), py::arg("b"));
    m.def("holder_exponent", [](const std::vector<double>& series) {
        const auto e = holder_exponent(series);
        py::dict d;
        d["exponent"] = e.exponent;
        d["slope"] = e.slope;
        d["standard_error"] = e.standard_error;
        d["degenerate"] = e.degenerate;
        return d;
    });
    m.def(
        "exchangeable_moment",
        [](const std::vector<double>& values, const std::function<double(double)>& g, std::size_t k) {
            const auto e = exchangeable_moment(values, g, k);
            py::dict d;
            d["lhs"] = e.lhs;
            d["coefficient"] = e.coefficient;
            d["distinct_average"] = e.distinct_average;
            d["remainder"] = e.remainder;
            d["rhs"] = e.rhs;
            return d;
        },
        py::arg("values"), py::arg("g"), py::arg("k"));

    m.def(
        "validate_config",
        [](const std::string& text) { return json_to_py(cli::validate_config(text).normalized); },
        py::arg("text"), "Normalized config (defaults applied); ValueError lists every problem.");
    m.def(
        "run_experiment",
        [](const std::string& text, unsigned threads, const std::string& output) {
            auto config = cli::validate_config(text);
            if (!output.empty()) {
                config.output = output;
            }
            cli::RunSummary summary;
            {
                py::gil_scoped_release release;
                cli::RunOptions options;
                options.threads = threads;
                summary = cli::run_experiment(config, options);
            }
            return json_to_py(summary.manifest);
        },
        py::arg("config"), py::arg("threads") = 1, py::arg("output") = "",
        "Runs a JSON experiment config and returns the manifest.");
}
