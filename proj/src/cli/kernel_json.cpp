#include "kernel_json.hpp"

#include "nuhawkes/errors.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace nuhawkes::cli {

namespace {

std::optional<double> number_or_inf(const json& v) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        return std::numeric_limits<double>::infinity();
    }
    return std::nullopt;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& errors) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            errors.push_back(where + "." + key + ": unknown key");
        }
    }
}

} // namespace

std::optional<Matrix> matrix_from_json(const json& value) {
    if (value.is_number()) {
        return Matrix::Constant(1, 1, value.get<double>());
    }
    if (!value.is_array() || value.empty()) {
        return std::nullopt;
    }
    const auto rows = value.size();
    if (!value[0].is_array()) {
        return std::nullopt;
    }
    const auto cols = value[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array() || value[i].size() != cols) {
            return std::nullopt;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!value[i][j].is_number()) {
                return std::nullopt;
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value[i][j].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    if (m.rows() == 1 && m.cols() == 1) {
        return m(0, 0);
    }
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        out.push_back(row);
    }
    return out;
}

Kernel kernel_from_json(const json& spec, const std::string& where, std::vector<std::string>& errors) {
    const auto start = errors.size();
    if (!spec.is_object()) {
        errors.push_back(where + ": must be an object {\"form\", \"params\"}");
        return Kernel();
    }
    check_keys(spec, {"form", "params"}, where, errors);
    if (!spec.contains("form") || !spec["form"].is_string()) {
        errors.push_back(where + ".form: required string (exponential | power_law | zero | grid_sampled)");
        return Kernel();
    }
    const std::string form = spec["form"].get<std::string>();
    const json params = spec.value("params", json::object());
    const std::string pw = where + ".params";
    if (!params.is_object()) {
        errors.push_back(pw + ": must be an object");
        return Kernel();
    }

    auto matrix_param = [&](const char* key) -> std::optional<Matrix> {
        if (!params.contains(key)) {
            errors.push_back(pw + "." + key + ": required");
            return std::nullopt;
        }
        auto m = matrix_from_json(params[key]);
        if (!m) {
            errors.push_back(pw + "." + key + ": must be a number or a rectangular array of numbers");
        }
        return m;
    };
    auto number_param = [&](const char* key, std::optional<double> fallback) -> std::optional<double> {
        if (!params.contains(key)) {
            if (!fallback) {
                errors.push_back(pw + "." + key + ": required");
            }
            return fallback;
        }
        auto v = number_or_inf(params[key]);
        if (!v) {
            errors.push_back(pw + "." + key + ": must be a number");
        }
        return v;
    };

    try {
        if (form == "exponential") {
            check_keys(params, {"alpha", "beta"}, pw, errors);
            auto alpha = matrix_param("alpha");
            auto beta = matrix_param("beta");
            if (alpha && beta && errors.size() == start) {
                return Kernel::exponential(*alpha, *beta);
            }
        } else if (form == "power_law") {
            check_keys(params, {"scale", "exponent", "cutoff"}, pw, errors);
            auto scale = matrix_param("scale");
            auto exponent = number_param("exponent", std::nullopt);
            auto cutoff = number_param("cutoff", 1.0);
            if (scale && exponent && cutoff && errors.size() == start) {
                return Kernel::power_law(*scale, *exponent, *cutoff);
            }
        } else if (form == "zero") {
            check_keys(params, {"dimension"}, pw, errors);
            const auto d = params.value("dimension", json(1));
            if (!d.is_number_integer() || d.get<long long>() < 1) {
                errors.push_back(pw + ".dimension: must be a positive integer");
            } else if (errors.size() == start) {
                return Kernel::zero(d.get<std::size_t>());
            }
        } else if (form == "grid_sampled") {
            check_keys(params, {"step", "cells"}, pw, errors);
            auto step = number_param("step", std::nullopt);
            std::vector<Matrix> cells;
            if (!params.contains("cells") || !params["cells"].is_array() || params["cells"].empty()) {
                errors.push_back(pw + ".cells: required nonempty array of matrices");
            } else {
                for (std::size_t k = 0; k < params["cells"].size(); ++k) {
                    auto m = matrix_from_json(params["cells"][k]);
                    if (!m) {
                        errors.push_back(pw + ".cells[" + std::to_string(k) + "]: malformed matrix");
                        break;
                    }
                    cells.push_back(*m);
                }
            }
            if (step && errors.size() == start) {
                return Kernel::grid_sampled(*step, std::move(cells));
            }
        } else {
            errors.push_back(where + ".form: unknown form '" + form + "'");
        }
    } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
    }
    return Kernel();
}

Kernel kernel_from_json(const json& spec) {
    std::vector<std::string> errors;
    auto kernel = kernel_from_json(spec, "kernel", errors);
    if (!errors.empty()) {
        throw ConfigError(errors.front());
    }
    return kernel;
}

json kernel_to_json(const Kernel& kernel) {
    return std::visit(
        [&](const auto& f) -> json {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, ExponentialForm>) {
                return {{"form", "exponential"},
                        {"params", {{"alpha", matrix_to_json(f.alpha)}, {"beta", matrix_to_json(f.beta)}}}};
            } else if constexpr (std::is_same_v<F, PowerLawForm>) {
                json cutoff = std::isinf(f.cutoff) ? json("inf") : json(f.cutoff);
                return {{"form", "power_law"},
                        {"params", {{"scale", matrix_to_json(f.scale)}, {"exponent", f.exponent}, {"cutoff", cutoff}}}};
            } else {
                json cells = json::array();
                for (const auto& c : f.cells) {
                    cells.push_back(matrix_to_json(c));
                }
                return {{"form", "grid_sampled"}, {"params", {{"step", f.step}, {"cells", cells}}}};
            }
        },
        kernel.form());
}

} // namespace nuhawkes::cli
