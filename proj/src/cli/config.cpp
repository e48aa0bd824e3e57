#include "config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace nuhawkes::cli {

namespace {

std::string join(const std::vector<std::string>& errors) {
    std::ostringstream out;
    out << "invalid config (" << errors.size() << (errors.size() == 1 ? " error)" : " errors)");
    for (const auto& e : errors) {
        out << "\n  " << e;
    }
    return out.str();
}

struct Reader {
    std::vector<std::string>& errors;

    void keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) {
                errors.push_back((where.empty() ? key : where + "." + key) + ": unknown key");
            }
        }
    }

    bool object(const json& parent, const char* key, const std::string& where) {
        if (!parent.contains(key)) {
            return false;
        }
        if (!parent[key].is_object()) {
            errors.push_back(where + ": must be an object");
            return false;
        }
        return true;
    }

    // number (or "inf" when allowed); keeps the fallback when absent
    void number(const json& obj, const char* key, const std::string& where, double& out, bool allow_inf = false) {
        if (!obj.contains(key)) {
            return;
        }
        const auto& v = obj[key];
        if (v.is_number()) {
            out = v.get<double>();
        } else if (allow_inf && v.is_string() && v.get<std::string>() == "inf") {
            out = std::numeric_limits<double>::infinity();
        } else {
            errors.push_back(where + ": must be a number" + (allow_inf ? " or \"inf\"" : ""));
        }
    }

    void count(const json& obj, const char* key, const std::string& where, std::size_t& out, std::size_t min) {
        if (!obj.contains(key)) {
            return;
        }
        const auto& v = obj[key];
        if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
            errors.push_back(where + ": must be an integer >= " + std::to_string(min));
            return;
        }
        out = v.get<std::size_t>();
    }

    void positive(double v, const std::string& where) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            errors.push_back(where + ": must be a finite number > 0");
        }
    }

    void nonnegative(double v, const std::string& where) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            errors.push_back(where + ": must be a finite number >= 0");
        }
    }
};

ExperimentKind parse_kind(const std::string& s, bool& ok) {
    ok = true;
    if (s == "resolvent") return ExperimentKind::resolvent;
    if (s == "hawkes") return ExperimentKind::hawkes;
    if (s == "meanfield") return ExperimentKind::meanfield;
    if (s == "limit") return ExperimentKind::limit;
    if (s == "regime-compare") return ExperimentKind::regime_compare;
    if (s == "acceptance-suite") return ExperimentKind::acceptance_suite;
    ok = false;
    return ExperimentKind::hawkes;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

std::optional<Vector> vector_from_json(const json& v) {
    if (v.is_number()) {
        return Vector::Constant(1, v.get<double>());
    }
    if (!v.is_array() || v.empty()) {
        return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            return std::nullopt;
        }
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

json inf_or_number(double v) { return std::isinf(v) ? json("inf") : json(v); }

json build_normalized(const ExperimentConfig& c) {
    json out;
    out["schema_version"] = config_schema_version;
    out["kind"] = kind_name(c.kind);
    out["seed"] = c.seed;
    out["grid"] = {{"T", c.horizon}, {"h", c.step}};
    out["paths"] = c.paths;
    if (c.kernel) {
        out["kernel"] = kernel_to_json(*c.kernel);
    }
    if (c.family) {
        out["family"] = {{"base", kernel_to_json(c.family->base)},
                         {"c", c.family->c},
                         {"schedule", {{"coefficient", c.family->schedule.coefficient}, {"power", c.family->schedule.power}}},
                         {"a", vector_json(c.family->target)}};
        if (c.family_n > 0) {
            out["family"]["n"] = c.family_n;
        }
    }
    switch (c.kind) {
    case ExperimentKind::hawkes: {
        json h = {{"method", c.hawkes.method}, {"beta", c.hawkes.beta}, {"export_paths", c.hawkes.export_paths}};
        if (c.hawkes.mu) {
            h["mu"] = vector_json(*c.hawkes.mu);
        }
        out["hawkes"] = h;
        break;
    }
    case ExperimentKind::meanfield:
    case ExperimentKind::regime_compare: {
        json m = {{"n", c.meanfield.n}, {"K", c.meanfield.tagged}, {"output_step", c.meanfield.output_step},
                  {"snapshot_times", c.meanfield.snapshot_times}};
        if (c.meanfield.mu0) {
            m["mu0"] = *c.meanfield.mu0;
        }
        if (c.meanfield.beta) {
            m["beta"] = *c.meanfield.beta;
        }
        out["meanfield"] = m;
        if (c.zeta) {
            out["regime"] = {{"zeta", inf_or_number(*c.zeta)}};
        }
        break;
    }
    case ExperimentKind::limit: {
        const auto& l = c.limit;
        json lj = {{"model", l.model}};
        if (l.model == "cir") {
            lj["cir"] = {{"a", l.cir.a}, {"b", l.cir.b}, {"sigma", l.cir.sigma}, {"xi0", l.cir.xi0}};
        } else {
            lj["a"] = l.level;
            if (l.sve_kernel == "bernstein") {
                json b = {{"drift", l.drift}, {"linear", l.linear}};
                if (l.stable) {
                    b["stable"] = {{"scale", l.stable->scale}, {"exponent", l.stable->exponent}};
                }
                lj["bernstein"] = b;
            } else {
                lj["fractional"] = {{"alpha", l.alpha},
                                    {"scale", l.scale},
                                    {"norm", l.norm == FractionalNorm::gamma_alpha ? "gamma_alpha" : "gamma_one_minus_alpha"}};
            }
        }
        out["limit"] = lj;
        break;
    }
    case ExperimentKind::acceptance_suite:
        out["quick"] = c.quick;
        break;
    case ExperimentKind::resolvent:
        break;
    }
    return out;
}

} // namespace

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::resolvent: return "resolvent";
    case ExperimentKind::hawkes: return "hawkes";
    case ExperimentKind::meanfield: return "meanfield";
    case ExperimentKind::limit: return "limit";
    case ExperimentKind::regime_compare: return "regime-compare";
    case ExperimentKind::acceptance_suite: return "acceptance-suite";
    }
    return "unknown";
}

NearlyUnstableFamily FamilySpec::build() const { return make_jr_family(base, c, schedule, target); }

Kernel ExperimentConfig::resolved_kernel() const {
    if (kernel) {
        return *kernel;
    }
    if (family && family_n > 0) {
        return family->build().kernel(family_n);
    }
    throw ConfigError("kernel: no kernel and no family member (family.n) configured");
}

ConfigValidationError::ConfigValidationError(std::vector<std::string> errors)
    : ConfigError(join(errors)), errors_(std::move(errors)) {}

ExperimentConfig validate_config(const std::string& text) {
    std::vector<std::string> errors;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigValidationError({std::string("<document>: not valid JSON: ") + e.what()});
    }
    if (!doc.is_object()) {
        throw ConfigValidationError({"<document>: must be a JSON object"});
    }
    Reader r{errors};
    r.keys(doc,
           {"schema_version", "kind", "seed", "output", "threads", "grid", "paths", "kernel", "family", "hawkes",
            "meanfield", "limit", "regime", "quick"},
           "");

    ExperimentConfig c;
    if (doc.contains("schema_version") &&
        (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != config_schema_version)) {
        errors.push_back("schema_version: must be " + std::to_string(config_schema_version));
    }

    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        errors.push_back("kind: required, one of resolvent | hawkes | meanfield | limit | regime-compare | acceptance-suite");
    } else {
        bool ok = false;
        c.kind = parse_kind(doc["kind"].get<std::string>(), ok);
        if (!ok) {
            errors.push_back("kind: unknown experiment kind '" + doc["kind"].get<std::string>() + "'");
        }
    }

    if (!doc.contains("seed")) {
        errors.push_back("seed: required unsigned 64-bit integer");
    } else if (doc["seed"].is_number_unsigned()) {
        c.seed = doc["seed"].get<std::uint64_t>();
    } else if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0) {
        c.seed = static_cast<std::uint64_t>(doc["seed"].get<long long>());
    } else {
        errors.push_back("seed: must be an unsigned 64-bit integer");
    }

    if (doc.contains("output")) {
        if (doc["output"].is_string()) {
            c.output = doc["output"].get<std::string>();
        } else {
            errors.push_back("output: must be a string");
        }
    }
    if (doc.contains("threads")) {
        std::size_t t = 1;
        r.count(doc, "threads", "threads", t, 1);
        c.threads = static_cast<unsigned>(t);
    }
    if (doc.contains("quick")) {
        if (doc["quick"].is_boolean()) {
            c.quick = doc["quick"].get<bool>();
        } else {
            errors.push_back("quick: must be a boolean");
        }
    }

    if (r.object(doc, "grid", "grid")) {
        const auto& g = doc["grid"];
        r.keys(g, {"T", "h"}, "grid");
        r.number(g, "T", "grid.T", c.horizon);
        r.number(g, "h", "grid.h", c.step);
    }
    r.positive(c.horizon, "grid.T");
    r.positive(c.step, "grid.h");
    if (c.step > 0.0 && c.horizon > 0.0) {
        if (c.step > c.horizon) {
            errors.push_back("grid.h: must not exceed grid.T");
        } else {
            try {
                (void)Grid(c.horizon, c.step);
            } catch (const std::exception& e) {
                errors.push_back(std::string("grid: ") + e.what());
            }
        }
    }
    r.count(doc, "paths", "paths", c.paths, 1);

    if (doc.contains("kernel")) {
        c.kernel = kernel_from_json(doc["kernel"], "kernel", errors);
    }
    if (r.object(doc, "family", "family")) {
        const auto& f = doc["family"];
        const auto family_start = errors.size();
        r.keys(f, {"base", "c", "schedule", "a", "n"}, "family");
        FamilySpec fs;
        if (!f.contains("base")) {
            errors.push_back("family.base: required kernel spec");
        } else {
            fs.base = kernel_from_json(f["base"], "family.base", errors);
        }
        r.number(f, "c", "family.c", fs.c);
        r.positive(fs.c, "family.c");
        if (r.object(f, "schedule", "family.schedule")) {
            r.keys(f["schedule"], {"coefficient", "power"}, "family.schedule");
            r.number(f["schedule"], "coefficient", "family.schedule.coefficient", fs.schedule.coefficient);
            r.number(f["schedule"], "power", "family.schedule.power", fs.schedule.power);
            r.positive(fs.schedule.coefficient, "family.schedule.coefficient");
            r.positive(fs.schedule.power, "family.schedule.power");
        }
        if (f.contains("a")) {
            auto v = vector_from_json(f["a"]);
            if (!v) {
                errors.push_back("family.a: must be a number or an array of numbers");
            } else {
                fs.target = *v;
            }
        }
        r.count(f, "n", "family.n", c.family_n, 1);
        if (errors.size() == family_start) {
            try {
                (void)fs.build();
                if (fs.target.size() != static_cast<Eigen::Index>(fs.base.dimension())) {
                    errors.push_back("family.a: length must match the base kernel dimension");
                }
                if (c.family_n > 0) {
                    (void)fs.build().a(c.family_n);
                }
            } catch (const std::exception& e) {
                errors.push_back(std::string("family: ") + e.what());
            }
        }
        c.family = fs;
    }

    if (r.object(doc, "hawkes", "hawkes")) {
        const auto& h = doc["hawkes"];
        r.keys(h, {"mu", "method", "beta", "export_paths"}, "hawkes");
        if (h.contains("mu")) {
            auto v = vector_from_json(h["mu"]);
            if (!v || (v->array() < 0.0).any()) {
                errors.push_back("hawkes.mu: must be a nonnegative number or array");
            } else {
                c.hawkes.mu = *v;
            }
        }
        if (h.contains("method")) {
            const auto m = h["method"].is_string() ? h["method"].get<std::string>() : std::string();
            if (m != "thinning" && m != "cluster") {
                errors.push_back("hawkes.method: must be \"thinning\" or \"cluster\"");
            } else {
                c.hawkes.method = m;
            }
        }
        r.number(h, "beta", "hawkes.beta", c.hawkes.beta);
        r.positive(c.hawkes.beta, "hawkes.beta");
        r.count(h, "export_paths", "hawkes.export_paths", c.hawkes.export_paths, 0);
    }

    if (r.object(doc, "meanfield", "meanfield")) {
        const auto& m = doc["meanfield"];
        r.keys(m, {"n", "K", "mu0", "beta", "output_step", "snapshot_times"}, "meanfield");
        if (m.contains("n")) {
            c.meanfield.n.clear();
            const json list = m["n"].is_array() ? m["n"] : json::array({m["n"]});
            for (const auto& v : list) {
                if (!v.is_number_integer() || v.get<long long>() < 1) {
                    errors.push_back("meanfield.n: entries must be integers >= 1");
                    break;
                }
                c.meanfield.n.push_back(v.get<std::size_t>());
            }
            if (c.meanfield.n.empty()) {
                errors.push_back("meanfield.n: must list at least one particle count");
            }
        }
        r.count(m, "K", "meanfield.K", c.meanfield.tagged, 0);
        if (m.contains("mu0")) {
            double v = 0.0;
            r.number(m, "mu0", "meanfield.mu0", v);
            r.nonnegative(v, "meanfield.mu0");
            c.meanfield.mu0 = v;
        }
        if (m.contains("beta")) {
            double v = 0.0;
            r.number(m, "beta", "meanfield.beta", v);
            r.positive(v, "meanfield.beta");
            c.meanfield.beta = v;
        }
        r.number(m, "output_step", "meanfield.output_step", c.meanfield.output_step);
        r.positive(c.meanfield.output_step, "meanfield.output_step");
        if (m.contains("snapshot_times")) {
            if (!m["snapshot_times"].is_array()) {
                errors.push_back("meanfield.snapshot_times: must be an array of numbers");
            } else {
                for (const auto& v : m["snapshot_times"]) {
                    if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > c.horizon) {
                        errors.push_back("meanfield.snapshot_times: entries must lie in [0, grid.T]");
                        break;
                    }
                    c.meanfield.snapshot_times.push_back(v.get<double>());
                }
            }
        }
        for (std::size_t n : c.meanfield.n) {
            if (c.meanfield.tagged > n) {
                errors.push_back("meanfield.K: K = " + std::to_string(c.meanfield.tagged) +
                                 " exceeds meanfield.n = " + std::to_string(n));
            }
        }
    }
    if (c.meanfield.snapshot_times.empty()) {
        c.meanfield.snapshot_times = {c.horizon};
    }

    if (r.object(doc, "regime", "regime")) {
        r.keys(doc["regime"], {"zeta"}, "regime");
        if (doc["regime"].contains("zeta")) {
            double z = 0.0;
            r.number(doc["regime"], "zeta", "regime.zeta", z, true);
            if (!(z >= 0.0)) {
                errors.push_back("regime.zeta: must be >= 0 or \"inf\"");
            }
            c.zeta = z;
        }
    }

    if (r.object(doc, "limit", "limit")) {
        const auto& l = doc["limit"];
        r.keys(l, {"model", "cir", "a", "bernstein", "fractional"}, "limit");
        auto& ls = c.limit;
        if (l.contains("model")) {
            const auto m = l["model"].is_string() ? l["model"].get<std::string>() : std::string();
            if (m != "cir" && m != "sve") {
                errors.push_back("limit.model: must be \"cir\" or \"sve\"");
            } else {
                ls.model = m;
            }
        }
        if (r.object(l, "cir", "limit.cir")) {
            const auto& ci = l["cir"];
            r.keys(ci, {"a", "b", "sigma", "xi0"}, "limit.cir");
            r.number(ci, "a", "limit.cir.a", ls.cir.a);
            r.number(ci, "b", "limit.cir.b", ls.cir.b);
            r.number(ci, "sigma", "limit.cir.sigma", ls.cir.sigma);
            r.number(ci, "xi0", "limit.cir.xi0", ls.cir.xi0);
            r.nonnegative(ls.cir.a, "limit.cir.a");
            r.nonnegative(ls.cir.b, "limit.cir.b");
            r.nonnegative(ls.cir.sigma, "limit.cir.sigma");
            r.nonnegative(ls.cir.xi0, "limit.cir.xi0");
        }
        r.number(l, "a", "limit.a", ls.level);
        r.nonnegative(ls.level, "limit.a");
        const bool has_b = r.object(l, "bernstein", "limit.bernstein");
        const bool has_f = r.object(l, "fractional", "limit.fractional");
        if (has_b && has_f) {
            errors.push_back("limit: give either limit.bernstein or limit.fractional, not both");
        }
        if (has_b) {
            const auto& b = l["bernstein"];
            r.keys(b, {"drift", "linear", "stable"}, "limit.bernstein");
            r.number(b, "drift", "limit.bernstein.drift", ls.drift);
            r.number(b, "linear", "limit.bernstein.linear", ls.linear);
            r.nonnegative(ls.drift, "limit.bernstein.drift");
            r.nonnegative(ls.linear, "limit.bernstein.linear");
            if (r.object(b, "stable", "limit.bernstein.stable")) {
                StableLevy s;
                r.keys(b["stable"], {"scale", "exponent"}, "limit.bernstein.stable");
                r.number(b["stable"], "scale", "limit.bernstein.stable.scale", s.scale);
                r.number(b["stable"], "exponent", "limit.bernstein.stable.exponent", s.exponent);
                r.positive(s.scale, "limit.bernstein.stable.scale");
                if (!(s.exponent > 0.0 && s.exponent < 1.0)) {
                    errors.push_back("limit.bernstein.stable.exponent: must lie in (0, 1)");
                }
                ls.stable = s;
                if (ls.linear != 0.0) {
                    errors.push_back("limit.bernstein.linear: must be 0 when a stable measure is given");
                }
            } else if (!(ls.linear > 0.0)) {
                errors.push_back("limit.bernstein.linear: must be > 0 without a stable measure");
            }
        }
        if (has_f) {
            const auto& f = l["fractional"];
            ls.sve_kernel = "fractional";
            r.keys(f, {"alpha", "scale", "norm"}, "limit.fractional");
            r.number(f, "alpha", "limit.fractional.alpha", ls.alpha);
            r.number(f, "scale", "limit.fractional.scale", ls.scale);
            if (!(ls.alpha > 0.5 && ls.alpha < 1.0)) {
                errors.push_back("limit.fractional.alpha: must lie in (1/2, 1)");
            }
            r.positive(ls.scale, "limit.fractional.scale");
            if (f.contains("norm")) {
                const auto n = f["norm"].is_string() ? f["norm"].get<std::string>() : std::string();
                if (n == "gamma_alpha") {
                    ls.norm = FractionalNorm::gamma_alpha;
                } else if (n != "gamma_one_minus_alpha") {
                    errors.push_back("limit.fractional.norm: must be \"gamma_one_minus_alpha\" or \"gamma_alpha\"");
                }
            }
        }
    }

    // kind-specific requirements
    switch (c.kind) {
    case ExperimentKind::resolvent:
    case ExperimentKind::hawkes:
        if (!c.kernel && !(c.family && c.family_n > 0)) {
            errors.push_back("kernel: required for kind " + kind_name(c.kind) + " (or family with family.n)");
        }
        if (c.kernel && c.family) {
            errors.push_back("kernel: give either kernel or family, not both");
        }
        break;
    case ExperimentKind::meanfield:
        if (!c.kernel && !c.family) {
            errors.push_back("kernel: required for kind meanfield (or family)");
        }
        if (c.kernel && c.kernel->dimension() != 1) {
            errors.push_back("kernel: mean-field systems need a univariate kernel");
        }
        break;
    case ExperimentKind::regime_compare:
        if (!c.family) {
            errors.push_back("family: required for kind regime-compare");
        } else if (errors.empty() &&
                   (!c.family->base.is_exponential() || c.family->base.dimension() != 1)) {
            errors.push_back("family.base: regime-compare needs a univariate exponential base");
        }
        break;
    case ExperimentKind::limit:
    case ExperimentKind::acceptance_suite:
        break;
    }
    if (c.kind == ExperimentKind::hawkes && c.hawkes.mu && errors.empty()) {
        const auto d = c.resolved_kernel().dimension();
        if (c.hawkes.mu->size() != static_cast<Eigen::Index>(d)) {
            errors.push_back("hawkes.mu: length " + std::to_string(c.hawkes.mu->size()) +
                             " does not match kernel dimension " + std::to_string(d));
        }
    }
    if (c.kind == ExperimentKind::hawkes && c.hawkes.method == "cluster" && errors.empty()) {
        bool stable = false;
        try {
            stable = l1_and_stability(c.resolved_kernel()).stable;
        } catch (const DomainError&) {
        }
        if (!stable) {
            errors.push_back("hawkes.method: cluster sampling needs a stable kernel (spectral radius < 1)");
        }
    }

    if (!errors.empty()) {
        throw ConfigValidationError(std::move(errors));
    }
    c.normalized = build_normalized(c);
    return c;
}

void refresh_normalized(ExperimentConfig& config) { config.normalized = build_normalized(config); }

} // namespace nuhawkes::cli
