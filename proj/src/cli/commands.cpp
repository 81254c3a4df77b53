#include "beamide/cli.hpp"

#include "beamide/errors.hpp"
#include "report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace beamide::cli {

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string short_num(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

const char* verdict(bool ok) { return ok ? "pass" : "FAIL"; }

std::string sign_line(const SignValidation& v) {
    std::string s = "operator sign: sigma = " + std::string(v.sigma > 0 ? "+1" : "-1") + " (residuals " +
                    short_num(v.residual_plus) + " / " + short_num(v.residual_minus) + ", tolerance " +
                    short_num(v.tolerance);
    if (!v.discriminating) {
        s += ", decided at probe M = " + short_num(v.probe_M);
    }
    return s + ")";
}

void print_check_table(std::ostream& out, const ContractionCertificate& c, const HypothesisReports& h) {
    out << std::left << std::setw(26) << "check" << std::setw(7) << "status" << "detail\n";
    out << std::setw(26) << "contraction (d < 1)" << std::setw(7) << verdict(c.satisfied) << "d = " << short_num(c.d)
        << "\n";
    const std::pair<const char*, const VerificationReport*> rows[] = {
        {"lower solution", &h.lower}, {"upper solution", &h.upper}, {"sector condition", &h.sector}};
    for (const auto& [label, r] : rows) {
        out << std::setw(26) << label << std::setw(7) << verdict(r->passed)
            << "worst violation " << short_num(r->worst_violation) << " (tol " << short_num(r->tolerance) << ")\n";
        for (const auto& c2 : r->checks) {
            if (c2.passed) {
                continue;
            }
            out << "  " << std::setw(24) << c2.name << std::setw(7) << "FAIL" << "violation "
                << short_num(c2.worst_violation) << " > " << short_num(c2.tolerance);
            if (!c2.sites.empty()) {
                const auto& s = c2.sites.front();
                out << " at x = " << short_num(s.x);
                if (s.tuple) {
                    out << " (u1, u2, v1, v2) = (" << short_num((*s.tuple)[0]) << ", " << short_num((*s.tuple)[1])
                        << ", " << short_num((*s.tuple)[2]) << ", " << short_num((*s.tuple)[3]) << ")";
                }
            }
            out << "\n";
        }
    }
    out << std::right;
}

MonotoneOptions options_of(const RunConfig& cfg) {
    MonotoneOptions o;
    o.tol = cfg.spec.tol;
    o.max_iter = cfg.spec.max_iter;
    o.force = cfg.force;
    o.samples = cfg.samples;
    o.seed = cfg.seed;
    return o;
}

void write_file(const OutputOptions& out, const std::string& name, const std::string& content,
                std::vector<std::string>& written) {
    std::filesystem::create_directories(out.dir);
    const std::filesystem::path path = out.dir / name;
    write_atomically(path, content);
    written.push_back(path.string());
}

ojson timings_json(bool enabled, const std::vector<std::pair<std::string, double>>& laps) {
    ojson t = {{"enabled", enabled}};
    if (enabled) {
        double total = 0.0;
        for (const auto& [name, s] : laps) {
            t[name + "_s"] = s;
            total += s;
        }
        t["total_s"] = total;
    }
    return t;
}

ojson order_certificate(const NonlinearIDE& problem) {
    // Hypotheses under which T = L^{-1} maps nonnegative data to nonnegative functions.
    const bool nk = problem.k().min() >= -1e-12 && problem.N() > 0.0;
    const bool mc = problem.M() < critical_constants().c1;
    const bool ct = problem.contraction().satisfied;
    return {{"Nk_nonneg", nk}, {"M_below_c1", mc}, {"contraction", ct}, {"inverse_order_preserving", nk && mc && ct}};
}

struct ReductionCheck {
    GridFunction u;
    double u0;
    double u1;
    double second_derivative_defect;
    double sixth_order_defect;
};

ReductionCheck check_reduction(const SixthOrderSpec& six, const GridFunction& y) {
    const Grid& grid = y.grid();
    GridFunction u = reconstruct_u(y, grid);
    const InteriorValues upp = fd_second_derivative(u);
    double d2 = 0.0;
    for (std::size_t j = upp.first; j <= upp.last; ++j) {
        d2 = std::max(d2, std::abs(upp.values[j] - y[j]));
    }
    const InteriorValues y4 = fd_fourth_derivative(y);
    double d6 = 0.0;
    for (std::size_t j = y4.first; j <= y4.last; ++j) {
        d6 = std::max(d6, std::abs(y4.values[j] - six.f6(grid.x(j), y[j], u[j])));
    }
    const double u0 = u[0];
    const double u1 = u[u.size() - 1];
    return ReductionCheck{std::move(u), u0, u1, d2, d6};
}

const char* failure_status(const IterationFailure& e) {
    if (dynamic_cast<const HypothesisFailure*>(&e)) return "hypothesis_failure";
    if (dynamic_cast<const MonotonicityBreach*>(&e)) return "monotonicity_breach";
    if (dynamic_cast<const NonConvergence*>(&e)) return "non_convergence";
    if (dynamic_cast<const CrossCheckFailure*>(&e)) return "crosscheck_failure";
    return "failure";
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw ConfigError("cannot write '" + tmp.string() + "'");
        }
        f << content;
        f.flush();
        if (!f) {
            throw ConfigError("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

// -- verify -------------------------------------------------------------------

int cmd_verify(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream&) {
    const RunConfig cfg = parse_run_config(read_json_file(config), o);
    const Grid grid(cfg.spec.n_panels);
    const NonlinearIDE problem = instantiate(cfg.spec, grid);
    const SectorPair sector = sector_of(cfg.spec, grid);
    const HypothesisReports h = verify_hypotheses(problem, sector, options_of(cfg));

    out << "problem " << cfg.spec.name << " (" << to_string(cfg.spec.provenance) << "), " << grid.n_panels()
        << " panels, M = " << short_num(cfg.spec.M) << ", N = " << short_num(cfg.spec.N) << "\n";
    out << sign_line(problem.green().sign()) << "\n";
    print_check_table(out, problem.contraction(), h);
    const bool ok = h.passed() && problem.contraction().satisfied;
    out << (ok ? "all checks passed\n" : "verification failed\n");
    return ok ? exit_ok : exit_math;
}

// -- solve --------------------------------------------------------------------

int cmd_solve(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err) {
    Stopwatch clock;
    std::vector<std::pair<std::string, double>> laps;
    const RunConfig cfg = parse_run_config(read_json_file(config), o);
    const Grid grid(cfg.spec.n_panels);
    const NonlinearIDE problem = instantiate(cfg.spec, grid);
    const SectorPair sector = sector_of(cfg.spec, grid);
    laps.emplace_back("setup", clock.lap());

    ExtremalResult result;
    std::string status = "converged";
    std::string message;
    try {
        result = monotone_iterate(problem, sector, grid, options_of(cfg));
    } catch (const IterationFailure& e) {
        result = e.partial();
        status = failure_status(e);
        message = e.what();
    }
    laps.emplace_back("iteration", clock.lap());

    const bool have_solution = !result.alpha_chain.empty();
    std::optional<InteriorValues> res_min;
    std::optional<InteriorValues> res_max;
    std::optional<ReductionCheck> reduction;
    if (have_solution) {
        res_min = residual(problem, result.y_min());
        res_max = residual(problem, result.y_max());
        if (cfg.spec.sixth_order) {
            reduction = check_reduction(*cfg.spec.sixth_order, result.y_min());
        }
    }

    std::vector<std::string> written;
    if (cfg.output.csv) {
        write_file(cfg.output, "chains.csv", chains_csv(result), written);
        if (have_solution) {
            write_file(cfg.output, "solution.csv", solution_csv(result.y_min(), result.y_max(), *res_min, *res_max),
                       written);
            if (reduction) {
                write_file(cfg.output, "reconstructed_u.csv", reconstructed_csv(reduction->u), written);
            }
        }
    }
    laps.emplace_back("output", clock.lap());

    if (cfg.output.json) {
        ojson report;
        report["problem"] = problem_json(cfg);
        report["certificates"] = {{"contraction", to_json(problem.contraction(), cfg.spec.claim)},
                                  {"sign", order_certificate(problem)},
                                  {"operator_sign", to_json(problem.green().sign(), GreenFormula::plus_m)}};
        report["verification"] = {{"lower", to_json(result.verification.lower)},
                                  {"upper", to_json(result.verification.upper)},
                                  {"sector", to_json(result.verification.sector)}};
        ojson it = to_json(result.report);
        it["status"] = status;
        if (!message.empty()) {
            it["message"] = message;
        }
        it["forced"] = result.forced;
        report["iteration"] = std::move(it);
        if (have_solution) {
            ojson sol = {{"x", vector_json(GridFunction(grid, grid.nodes()))},
                         {"y_min", vector_json(result.y_min())},
                         {"y_max", vector_json(result.y_max())},
                         {"residuals", {{"min", interior_json(*res_min)}, {"max", interior_json(*res_max)}}}};
            if (reduction) {
                sol["reconstructed_u"] = {{"u", vector_json(reduction->u)},
                                          {"u_at_0", reduction->u0},
                                          {"u_at_1", reduction->u1},
                                          {"second_derivative_defect", reduction->second_derivative_defect},
                                          {"sixth_order_defect", reduction->sixth_order_defect}};
            }
            report["solutions"] = std::move(sol);
        } else {
            report["solutions"] = nullptr;
        }
        report["timings"] = timings_json(cfg.timings, laps);
        write_file(cfg.output, "report.json", dump(report), written);
    }

    out << "problem " << cfg.spec.name << " (" << to_string(cfg.spec.provenance) << "), " << grid.n_panels()
        << " panels\n";
    out << sign_line(problem.green().sign()) << "\n";
    print_check_table(out, problem.contraction(), result.verification);
    if (result.forced) {
        out << "forced: iterating although verification failed\n";
    }
    const IterationReport& r = result.report;
    out << "iterations: " << r.iterations << " (" << status << "), final gap "
        << (r.gap_history.empty() ? 0.0 : r.gap_history.back()) << ", monotonicity violation "
        << short_num(r.monotonicity_violation) << "\n";
    if (have_solution) {
        out << "residuals: y_min " << short_num(r.residual_min) << ", y_max " << short_num(r.residual_max) << "\n";
    }
    if (reduction) {
        out << "reconstructed u: u(0) = " << reduction->u0 << ", u(1) = " << reduction->u1 << ", |u'' - y| <= "
            << short_num(reduction->second_derivative_defect) << ", sixth-order defect "
            << short_num(reduction->sixth_order_defect) << "\n";
    }
    for (const auto& w : written) {
        out << "wrote " << w << "\n";
    }
    if (!message.empty()) {
        err << "error: " << message << "\n";
    }
    return status == "converged" ? exit_ok : exit_math;
}

// -- linear -------------------------------------------------------------------

int cmd_linear(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err) {
    Stopwatch clock;
    std::vector<std::pair<std::string, double>> laps;
    const LinearConfig cfg = parse_linear_config(read_json_file(config), o);
    const Grid grid(cfg.n_panels);
    const GridFunction p = GridFunction::sample(grid, [&](double x) { return cfg.p(x); });
    LinearIDE lin{cfg.M, cfg.N, cfg.k.tabulate(grid), p, cfg.bd, cfg.formula};
    const DiscreteLinearProblem dp(lin, grid);
    const ContractionCertificate& cert = dp.contraction();
    const SignCertificate sign = max_principle_certificate(dp);
    laps.emplace_back("setup", clock.lap());

    out << "linear problem " << cfg.name << ", " << grid.n_panels() << " panels, M = " << short_num(cfg.M)
        << ", N = " << short_num(cfg.N) << "\n";
    out << sign_line(dp.green().sign()) << "\n";
    out << "contraction: " << verdict(cert.satisfied) << ", d = " << short_num(cert.d) << " (||k|| = "
        << short_num(cert.k_sup) << ", max int G = " << short_num(cert.g_max) << ")\n";
    if (!cert.satisfied) {
        err << "error: contraction condition violated (d = " << short_num(cert.d) << " >= 1)\n";
        return exit_math;
    }

    const PicardResult pic = picard_solve(dp, cfg.tol, cfg.max_iter);
    const ResolventResult res = resolvent_kernel(dp, cfg.tol);
    const GridFunction y_res = solve_via_resolvent(dp, res);
    const NystromResult nys = nystrom_solve(dp);
    laps.emplace_back("solve", clock.lap());

    const double d_pr = sup_distance(pic.solution, y_res);
    const double d_pn = sup_distance(pic.solution, nys.solution);
    const double d_rn = sup_distance(y_res, nys.solution);
    const double worst = std::max({d_pr, d_pn, d_rn});
    const bool agree = worst <= 1e-6;
    out << "picard: " << pic.iterations << " iterations; resolvent: " << res.truncation_index
        << " terms; nystrom: condition " << short_num(nys.condition) << "\n";
    out << "pairwise sup distances: picard-resolvent " << short_num(d_pr) << ", picard-nystrom " << short_num(d_pn)
        << ", resolvent-nystrom " << short_num(d_rn) << " (" << verdict(agree) << ", tol 1e-06)\n";

    std::optional<GridFunction> exact;
    double exact_error = 0.0;
    if (cfg.exact) {
        exact = GridFunction::sample(grid, [&](double x) { return (*cfg.exact)(x); });
        exact_error = sup_distance(nys.solution, *exact);
        out << "error vs exact solution: " << short_num(exact_error) << "\n";
    }
    const double res_norm = linear_residual(dp, nys.solution);
    out << "equation residual: " << short_num(res_norm) << "\n";

    bool principle_ok = true;
    std::string principle;
    if (sign.applicable) {
        const bool case_i = sign.promised == PrinciplePattern::case_i;
        principle_ok = case_i ? nys.solution.values().minCoeff() >= -1e-10 : nys.solution.values().maxCoeff() <= 1e-10;
        principle = std::string("max principle: applicable(") + (case_i ? "i" : "ii") + "), solution " +
                    (case_i ? ">= 0 " : "<= 0 ") + (principle_ok ? "confirmed" : "VIOLATED");
    } else {
        principle = "max principle: not applicable (p " + std::string(to_string(sign.p_sign)) + ", boundary data " +
                    to_string(sign.bd_pattern) + (sign.Nk_nonneg ? "" : ", N k not >= 0") +
                    (sign.M_below_c1 ? "" : ", M >= c1") + ")";
    }
    out << principle << "\n";

    std::vector<std::string> written;
    if (cfg.output.csv) {
        write_file(cfg.output, "solution.csv", linear_csv(pic.solution, y_res, nys.solution, exact), written);
    }
    laps.emplace_back("output", clock.lap());
    if (cfg.output.json) {
        ojson report;
        report["problem"] = problem_json(cfg);
        ojson sign_json = to_json(sign);
        sign_json["summary"] = principle;
        report["certificates"] = {{"contraction", to_json(cert, std::nullopt)},
                                  {"sign", std::move(sign_json)},
                                  {"operator_sign", to_json(dp.green().sign(), cfg.formula)}};
        ojson sol = {{"x", vector_json(GridFunction(grid, grid.nodes()))},
                     {"picard", vector_json(pic.solution)},
                     {"resolvent", vector_json(y_res)},
                     {"nystrom", vector_json(nys.solution)}};
        if (exact) {
            sol["exact"] = vector_json(*exact);
            sol["error_vs_exact"] = exact_error;
        }
        sol["agreement"] = {{"picard_resolvent", d_pr},
                            {"picard_nystrom", d_pn},
                            {"resolvent_nystrom", d_rn},
                            {"tolerance", 1e-6},
                            {"passed", agree}};
        sol["residual"] = res_norm;
        sol["picard_iterations"] = pic.iterations;
        sol["resolvent_terms"] = res.truncation_index;
        sol["nystrom_condition"] = nys.condition;
        report["solutions"] = std::move(sol);
        report["timings"] = timings_json(cfg.timings, laps);
        write_file(cfg.output, "report.json", dump(report), written);
    }
    for (const auto& w : written) {
        out << "wrote " << w << "\n";
    }
    return agree && principle_ok ? exit_ok : exit_math;
}

// -- list ---------------------------------------------------------------------

int cmd_list(std::ostream& out) {
    for (const auto& b : builtin_list()) {
        out << std::left << std::setw(13) << b.name << std::setw(26) << to_string(b.provenance) << b.summary << "\n";
    }
    out << std::right;
    return exit_ok;
}

// -- argument parsing -----------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lower/upper-solution verification and monotone iteration for nonlocal beam equations", "beamide"};
    app.require_subcommand(1);

    std::string config;
    int grid = 0;
    double tol = 0.0;
    int max_iter = 0;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    Overrides o;

    std::vector<CLI::Option*> grid_opts, tol_opts, iter_opts, out_opts, format_opts, seed_opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config, "JSON configuration file")->required();
        grid_opts.push_back(sub->add_option("--grid", grid, "number of panels (even, >= 4)"));
        tol_opts.push_back(sub->add_option("--tol", tol, "solver tolerance"));
        iter_opts.push_back(sub->add_option("--max-iter", max_iter, "iteration budget"));
        out_opts.push_back(sub->add_option("--out", out_dir, "output directory"));
        format_opts.push_back(
            sub->add_option("--format", format, "output formats")->check(CLI::IsMember({"csv", "json", "both"})));
        seed_opts.push_back(sub->add_option("--seed", seed, "sector sampler seed"));
        sub->add_flag("--force", o.force, "iterate even if verification fails");
        sub->add_flag("--timings", o.timings, "record wall-clock timings in the report");
        sub->add_flag("-v,--verbose", o.verbosity, "more output");
    };
    CLI::App* verify = app.add_subcommand("verify", "check the contraction, lower/upper solution and sector conditions");
    CLI::App* solve = app.add_subcommand("solve", "run the monotone iteration and write chains, solution and report");
    CLI::App* linear = app.add_subcommand("linear", "solve a linear problem by Picard, resolvent and Nystrom");
    CLI::App* list = app.add_subcommand("list", "list built-in problems");
    for (CLI::App* sub : {verify, solve, linear}) {
        add_common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    auto given = [](const std::vector<CLI::Option*>& opts) {
        for (const auto* opt : opts) {
            if (opt->count() > 0) return true;
        }
        return false;
    };
    if (given(grid_opts)) o.n_panels = grid;
    if (given(tol_opts)) o.tol = tol;
    if (given(iter_opts)) o.max_iter = max_iter;
    if (given(out_opts)) o.out_dir = out_dir;
    if (given(format_opts)) o.format = format;
    if (given(seed_opts)) o.seed = seed;

    try {
        if (*list) return cmd_list(out);
        if (*verify) return cmd_verify(config, o, out, err);
        if (*solve) return cmd_solve(config, o, out, err);
        return cmd_linear(config, o, out, err);
    } catch (const MathError& e) {
        err << "error: " << e.what() << "\n";
        return exit_math;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace beamide::cli
