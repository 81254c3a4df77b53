#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace beamide::cli {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson to_json(const CheckResult& c) {
    ojson sites = ojson::array();
    for (const auto& s : c.sites) {
        ojson e = {{"node", s.node}, {"x", s.x}, {"violation", s.violation}};
        if (s.tuple) {
            e["u1"] = (*s.tuple)[0];
            e["u2"] = (*s.tuple)[1];
            e["v1"] = (*s.tuple)[2];
            e["v2"] = (*s.tuple)[3];
        }
        sites.push_back(std::move(e));
    }
    return {{"name", c.name},
            {"passed", c.passed},
            {"worst_violation", c.worst_violation},
            {"tolerance", c.tolerance},
            {"violation_locations", std::move(sites)}};
}

ojson to_json(const VerificationReport& r) {
    ojson checks = ojson::array();
    for (const auto& c : r.checks) {
        checks.push_back(to_json(c));
    }
    ojson j = {{"passed", r.passed}, {"worst_violation", r.worst_violation}, {"tolerance", r.tolerance}};
    if (r.kind == "sector") {
        j["samples"] = r.samples;
        j["seed"] = r.seed;
    }
    j["checks"] = std::move(checks);
    return j;
}

ojson to_json(const ContractionCertificate& c, const std::optional<StatedClaim>& claim) {
    ojson j = {{"k_sup", c.k_sup}, {"max_green_integral", c.g_max}, {"d", c.d}, {"satisfied", c.satisfied}};
    const double computed_bound = 1.0 / (c.k_sup * c.g_max);
    j["N_bound_computed"] = std::isfinite(computed_bound) ? ojson(computed_bound) : ojson(nullptr);
    if (claim) {
        const bool differs = std::abs(claim->g_max - c.g_max) > 1e-6 * std::max(1.0, c.g_max);
        j["stated"] = {{"max_green_integral", claim->g_max}, {"N_bound", claim->N_bound}};
        j["discrepancy"] = differs;
        if (differs) {
            j["discrepancy_note"] =
                "stated max_x int G(x,s) ds differs from the quadrature value; the stated N bound is the more "
                "conservative of the two";
        }
    }
    return j;
}

ojson to_json(const SignValidation& v, GreenFormula formula) {
    return {{"sigma", v.sigma},
            {"formula", to_string(formula)},
            {"residual_plus", v.residual_plus},
            {"residual_minus", v.residual_minus},
            {"tolerance", v.tolerance},
            {"probe_M", v.probe_M},
            {"discriminating", v.discriminating},
            {"matches_nominal", v.matches_nominal}};
}

ojson to_json(const SignCertificate& c) {
    return {{"p_sign", to_string(c.p_sign)},
            {"boundary_pattern", to_string(c.bd_pattern)},
            {"Nk_nonneg", c.Nk_nonneg},
            {"M_below_c1", c.M_below_c1},
            {"contraction", c.contraction},
            {"applicable", c.applicable},
            {"promised", to_string(c.promised)}};
}

ojson to_json(const IterationReport& r) {
    ojson steps = ojson::array();
    for (const auto& s : r.step_history) {
        steps.push_back({{"alpha", s.alpha}, {"beta", s.beta}});
    }
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"gap_history", r.gap_history},
            {"step_history", std::move(steps)},
            {"monotonicity_violation", r.monotonicity_violation},
            {"residual_min", r.residual_min},
            {"residual_max", r.residual_max},
            {"crosschecks", r.crosschecks},
            {"crosscheck_difference", r.crosscheck_difference}};
}

ojson vector_json(const GridFunction& f) {
    ojson a = ojson::array();
    for (std::size_t j = 0; j < f.size(); ++j) {
        a.push_back(f[j]);
    }
    return a;
}

ojson interior_json(const InteriorValues& v) {
    ojson a = ojson::array();
    for (std::size_t j = 0; j < v.values.size(); ++j) {
        a.push_back(v.excluded(j) ? ojson(nullptr) : ojson(v.values[j]));
    }
    return a;
}

ojson problem_json(const RunConfig& cfg) {
    const ProblemSpec& s = cfg.spec;
    ojson j = {{"name", s.name}, {"provenance", to_string(s.provenance)}};
    if (s.sixth_order) {
        j["f6"] = s.sixth_order->f6.to_string();
        j["reduction"] = "y = u'', u = -int k y, f(x,u,v) = f6(x,u,-v)";
    }
    j["f"] = s.f.to_string();
    j["k"] = s.k.triangular() ? std::string("triangular") : s.k.expr->to_string();
    j["M"] = s.M;
    j["N"] = s.N;
    j["alpha"] = s.alpha.to_string();
    j["beta"] = s.beta.to_string();
    j["grid"] = {{"n_panels", s.n_panels}};
    j["solver"] = {{"tol", s.tol}, {"max_iter", s.max_iter}};
    j["sampler"] = {{"samples", cfg.samples}, {"seed", cfg.seed}};
    j["force"] = cfg.force;
    return j;
}

ojson problem_json(const LinearConfig& cfg) {
    ojson j = {{"name", cfg.name},
               {"M", cfg.M},
               {"N", cfg.N},
               {"k", cfg.k.triangular() ? std::string("triangular") : cfg.k.expr->to_string()},
               {"p", cfg.p.to_string()},
               {"A", cfg.bd.A},
               {"B", cfg.bd.B},
               {"C", cfg.bd.C},
               {"D", cfg.bd.D}};
    if (cfg.exact) {
        j["exact"] = cfg.exact->to_string();
    }
    j["formula"] = to_string(cfg.formula);
    j["grid"] = {{"n_panels", cfg.n_panels}};
    j["solver"] = {{"tol", cfg.tol}, {"max_iter", cfg.max_iter}};
    return j;
}

void require_finite(const ojson& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw std::logic_error("non-finite number in report at '" + path + "'");
    }
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            require_finite(value, path + "/" + key);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            require_finite(j[i], path + "/" + std::to_string(i));
        }
    }
}

std::string dump(const ojson& j) {
    require_finite(j);
    return j.dump(2) + "\n";
}

std::string chains_csv(const ExtremalResult& r) {
    std::string out = "iteration,x,alpha_n,beta_n\n";
    for (std::size_t n = 0; n < r.alpha_chain.size(); ++n) {
        const GridFunction& a = r.alpha_chain[n];
        const GridFunction& b = r.beta_chain[n];
        for (std::size_t j = 0; j < a.size(); ++j) {
            out += std::to_string(n) + "," + format_number(a.grid().x(j)) + "," + format_number(a[j]) + "," +
                   format_number(b[j]) + "\n";
        }
    }
    return out;
}

std::string solution_csv(const GridFunction& y_min, const GridFunction& y_max, const InteriorValues& res_min,
                         const InteriorValues& res_max) {
    std::string out = "x,y_min,y_max,residual_min,residual_max\n";
    for (std::size_t j = 0; j < y_min.size(); ++j) {
        out += format_number(y_min.grid().x(j)) + "," + format_number(y_min[j]) + "," + format_number(y_max[j]) + ",";
        out += res_min.excluded(j) ? "" : format_number(res_min.values[j]);
        out += ",";
        out += res_max.excluded(j) ? "" : format_number(res_max.values[j]);
        out += "\n";
    }
    return out;
}

std::string reconstructed_csv(const GridFunction& u) {
    std::string out = "x,u\n";
    for (std::size_t j = 0; j < u.size(); ++j) {
        out += format_number(u.grid().x(j)) + "," + format_number(u[j]) + "\n";
    }
    return out;
}

std::string linear_csv(const GridFunction& picard, const GridFunction& resolvent, const GridFunction& nystrom,
                       const std::optional<GridFunction>& exact) {
    std::string out = exact ? "x,picard,resolvent,nystrom,exact\n" : "x,picard,resolvent,nystrom\n";
    for (std::size_t j = 0; j < picard.size(); ++j) {
        out += format_number(picard.grid().x(j)) + "," + format_number(picard[j]) + "," +
               format_number(resolvent[j]) + "," + format_number(nystrom[j]);
        if (exact) {
            out += "," + format_number((*exact)[j]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace beamide::cli
