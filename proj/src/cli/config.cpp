#include "beamide/cli.hpp"

#include "beamide/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace beamide::cli {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

const json* find(const json& j, const std::string& key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError("config key '" + key + "' must be finite");
    }
    return d;
}

long long get_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    return v.get<long long>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) {
        throw ConfigError("config key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) {
        throw ConfigError("config key '" + key + "' must be true or false");
    }
    return v.get<bool>();
}

template <class F>
auto with_key(const std::string& key, F&& parse) {
    try {
        return parse();
    } catch (const ParseError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

Expression parse_key(const json& doc, const std::string& key, std::vector<std::string> vars) {
    const std::string text = get_string(doc.at(key), key);
    return with_key(key, [&] { return Expression::parse(text, std::move(vars)); });
}

KernelSpec parse_kernel(const json& doc) {
    const std::string text = get_string(doc.at("k"), "k");
    return with_key("k", [&] { return KernelSpec::parse(text); });
}

void apply_formats(const std::string& value, OutputOptions& out) {
    if (value == "csv") {
        out.csv = true, out.json = false;
    } else if (value == "json") {
        out.csv = false, out.json = true;
    } else if (value == "both") {
        out.csv = true, out.json = true;
    } else {
        throw ConfigError("format must be csv, json or both, got '" + value + "'");
    }
}

OutputOptions parse_output(const json& doc, const Overrides& o) {
    OutputOptions out;
    if (const json* j = find(doc, "output")) {
        require_object(*j, "output");
        reject_unknown(*j, {"dir", "formats"}, "output.");
        if (const json* d = find(*j, "dir")) {
            out.dir = get_string(*d, "output.dir");
        }
        if (const json* f = find(*j, "formats")) {
            if (!f->is_array() || f->empty()) {
                throw ConfigError("config key 'output.formats' must be a non-empty array");
            }
            out.csv = out.json = false;
            for (const auto& e : *f) {
                const std::string s = get_string(e, "output.formats");
                if (s == "csv") {
                    out.csv = true;
                } else if (s == "json") {
                    out.json = true;
                } else {
                    throw ConfigError("unknown output format '" + s + "'");
                }
            }
        }
    }
    if (o.out_dir) {
        out.dir = *o.out_dir;
    }
    if (o.format) {
        apply_formats(*o.format, out);
    }
    return out;
}

struct SolverSettings {
    int n_panels;
    double tol;
    int max_iter;
};

void parse_solver(const json& doc, SolverSettings& s) {
    if (const json* g = find(doc, "grid")) {
        require_object(*g, "grid");
        reject_unknown(*g, {"n_panels"}, "grid.");
        if (const json* n = find(*g, "n_panels")) {
            s.n_panels = static_cast<int>(std::clamp(get_integer(*n, "grid.n_panels"), -1LL, 1LL << 20));
        }
    }
    if (const json* j = find(doc, "solver")) {
        require_object(*j, "solver");
        reject_unknown(*j, {"tol", "max_iter"}, "solver.");
        if (const json* t = find(*j, "tol")) {
            s.tol = get_number(*t, "solver.tol");
        }
        if (const json* m = find(*j, "max_iter")) {
            s.max_iter = static_cast<int>(std::clamp(get_integer(*m, "solver.max_iter"), -1LL, 1LL << 30));
        }
    }
}

void apply_solver_overrides(const Overrides& o, SolverSettings& s) {
    if (o.n_panels) s.n_panels = *o.n_panels;
    if (o.tol) s.tol = *o.tol;
    if (o.max_iter) s.max_iter = *o.max_iter;
    if (s.n_panels < 4 || s.n_panels % 2 != 0) {
        throw ConfigError("grid.n_panels must be even and >= 4, got " + std::to_string(s.n_panels));
    }
    if (!(s.tol > 0.0)) {
        throw ConfigError("solver.tol must be positive");
    }
}

const std::vector<std::string> kVarsF = {"x", "u", "v"};
const std::vector<std::string> kVarsX = {"x"};

}  // namespace

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON (byte " + std::to_string(e.byte) +
                          ")");
    }
}

RunConfig parse_run_config(const json& doc, const Overrides& o) {
    require_object(doc, "config");
    reject_unknown(doc, {"problem", "f", "f6", "k", "M", "N", "alpha", "beta", "grid", "solver", "sampler", "output",
                         "force"},
                   "");

    const std::string name = find(doc, "problem") ? get_string(doc.at("problem"), "problem") : "custom";
    const bool is_builtin = name == "example-4.1" || name == "example-4.2";
    if (find(doc, "f") && find(doc, "f6")) {
        throw ConfigError("config keys 'f' and 'f6' are mutually exclusive");
    }
    if (find(doc, "f6") && find(doc, "k")) {
        throw ConfigError("config key 'k' cannot be combined with 'f6' (the reduction fixes the kernel)");
    }

    std::optional<ProblemSpec> base;
    if (is_builtin) {
        base = builtin_spec(name);
    } else {
        const bool has_rhs = find(doc, "f") || find(doc, "f6");
        for (const char* key : {"M", "N", "alpha", "beta"}) {
            if (!find(doc, key)) {
                throw ConfigError("config for problem '" + name + "' is missing '" + key +
                                  "' (built-ins: example-4.1, example-4.2)");
            }
        }
        if (!has_rhs || (find(doc, "f") && !find(doc, "k"))) {
            throw ConfigError("config for problem '" + name + "' needs 'f' and 'k', or 'f6'");
        }
    }

    const double M = find(doc, "M") ? get_number(doc.at("M"), "M") : base->M;
    const double N = find(doc, "N") ? get_number(doc.at("N"), "N") : base->N;

    std::optional<SixthOrderSpec> sixth = base ? base->sixth_order : std::nullopt;
    if (find(doc, "f") || find(doc, "k")) {
        sixth.reset();
    }
    if (find(doc, "f6")) {
        sixth = SixthOrderSpec{parse_key(doc, "f6", {"x", "p", "q"}), M, N};
    } else if (sixth) {
        sixth->M = M;
        sixth->N = N;
    }

    Expression f = sixth ? reduced_rhs(*sixth) : (find(doc, "f") ? parse_key(doc, "f", kVarsF) : base->f);
    KernelSpec k = sixth ? KernelSpec::parse("triangular") : (find(doc, "k") ? parse_kernel(doc) : base->k);
    Expression alpha = find(doc, "alpha") ? parse_key(doc, "alpha", kVarsX) : base->alpha;
    Expression beta = find(doc, "beta") ? parse_key(doc, "beta", kVarsX) : base->beta;

    ProblemSpec spec;
    spec.name = name;
    spec.f = std::move(f);
    spec.k = std::move(k);
    spec.M = M;
    spec.N = N;
    spec.alpha = std::move(alpha);
    spec.beta = std::move(beta);
    if (base) {
        spec.provenance = base->provenance;
        spec.n_panels = base->n_panels;
        spec.tol = base->tol;
        spec.max_iter = base->max_iter;
        if (base->claim && !find(doc, "M") && !find(doc, "k") && !find(doc, "f")) {
            spec.claim = base->claim;
        }
    }
    spec.sixth_order = std::move(sixth);

    SolverSettings s{spec.n_panels, spec.tol, spec.max_iter};
    parse_solver(doc, s);
    apply_solver_overrides(o, s);
    if (s.max_iter < 1) {
        throw ConfigError("solver.max_iter must be >= 1");
    }
    spec.n_panels = s.n_panels;
    spec.tol = s.tol;
    spec.max_iter = s.max_iter;

    RunConfig cfg;
    cfg.spec = std::move(spec);
    if (const json* j = find(doc, "sampler")) {
        require_object(*j, "sampler");
        reject_unknown(*j, {"samples", "seed"}, "sampler.");
        if (const json* n = find(*j, "samples")) {
            const long long v = get_integer(*n, "sampler.samples");
            if (v < 0) {
                throw ConfigError("sampler.samples must be >= 0");
            }
            cfg.samples = static_cast<std::size_t>(v);
        }
        if (const json* sd = find(*j, "seed")) {
            if (!sd->is_number_unsigned()) {
                throw ConfigError("config key 'sampler.seed' must be a nonnegative integer");
            }
            cfg.seed = sd->get<std::uint64_t>();
        }
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    cfg.force = (find(doc, "force") && get_bool(doc.at("force"), "force")) || o.force;
    cfg.output = parse_output(doc, o);
    cfg.timings = o.timings;
    cfg.verbosity = o.verbosity;
    return cfg;
}

LinearConfig parse_linear_config(const json& doc, const Overrides& o) {
    require_object(doc, "config");
    reject_unknown(doc, {"problem", "M", "N", "k", "p", "A", "B", "C", "D", "exact", "formula", "grid", "solver",
                         "output"},
                   "");
    for (const char* key : {"M", "N", "k", "p"}) {
        if (!find(doc, key)) {
            throw ConfigError(std::string("linear config is missing '") + key + "'");
        }
    }
    LinearConfig cfg{};
    if (const json* j = find(doc, "problem")) {
        cfg.name = get_string(*j, "problem");
    }
    cfg.M = get_number(doc.at("M"), "M");
    cfg.N = get_number(doc.at("N"), "N");
    cfg.k = parse_kernel(doc);
    cfg.p = parse_key(doc, "p", kVarsX);
    double* slots[] = {&cfg.bd.A, &cfg.bd.B, &cfg.bd.C, &cfg.bd.D};
    const char* names[] = {"A", "B", "C", "D"};
    for (int i = 0; i < 4; ++i) {
        if (const json* j = find(doc, names[i])) {
            *slots[i] = get_number(*j, names[i]);
        }
    }
    if (find(doc, "exact")) {
        cfg.exact = parse_key(doc, "exact", kVarsX);
    }
    if (const json* j = find(doc, "formula")) {
        const std::string f = get_string(*j, "formula");
        if (f == "plus_m") {
            cfg.formula = GreenFormula::plus_m;
        } else if (f == "minus_m") {
            cfg.formula = GreenFormula::minus_m;
        } else {
            throw ConfigError("formula must be plus_m or minus_m, got '" + f + "'");
        }
    }
    SolverSettings s{cfg.n_panels, cfg.tol, cfg.max_iter};
    parse_solver(doc, s);
    apply_solver_overrides(o, s);
    cfg.n_panels = s.n_panels;
    cfg.tol = s.tol;
    cfg.max_iter = std::max(0, s.max_iter);
    cfg.output = parse_output(doc, o);
    cfg.timings = o.timings;
    cfg.verbosity = o.verbosity;
    return cfg;
}

}  // namespace beamide::cli
