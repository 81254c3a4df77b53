#include "beamide/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace beamide {

namespace {

constexpr double kKernelSignTol = 1e-12;
constexpr double kOrderTol = 1e-12;
constexpr double kBreachTol = 1e-8;
constexpr std::size_t kMaxSites = 10;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Accumulates the worst offenders of one inequality.
class CheckBuilder {
public:
    CheckBuilder(std::string name, double tol) { result_.name = std::move(name), result_.tolerance = tol; }

    void record(std::size_t node, double x, double violation,
                std::optional<std::array<double, 4>> tuple = std::nullopt) {
        if (!(violation > 0.0)) {
            return;
        }
        result_.worst_violation = std::max(result_.worst_violation, violation);
        if (violation <= result_.tolerance) {
            return;
        }
        auto& sites = result_.sites;
        if (sites.size() == kMaxSites && violation <= sites.back().violation) {
            return;
        }
        ViolationSite s{node, x, violation, tuple};
        sites.insert(std::upper_bound(sites.begin(), sites.end(), s,
                                      [](const ViolationSite& a, const ViolationSite& b) {
                                          return a.violation > b.violation;
                                      }),
                     s);
        if (sites.size() > kMaxSites) {
            sites.pop_back();
        }
    }

    CheckResult finish() {
        result_.passed = result_.worst_violation <= result_.tolerance;
        return std::move(result_);
    }

private:
    CheckResult result_;
};

VerificationReport assemble(std::string kind, double tol, std::vector<CheckResult> checks) {
    VerificationReport r;
    r.kind = std::move(kind);
    r.tolerance = tol;
    for (const auto& c : checks) {
        r.passed = r.passed && c.passed;
        r.worst_violation = std::max(r.worst_violation, c.worst_violation);
    }
    r.checks = std::move(checks);
    return r;
}

// side = +1 for a lower solution (y'''' <= f, y <= 0 and y'' >= 0 at the ends),
// side = -1 for an upper solution (all reversed).
VerificationReport verify_side(const NonlinearIDE& problem, const GridFunction& y, double tol, int side) {
    require_same_grid(problem.grid(), y.grid(), side > 0 ? "verify_lower" : "verify_upper");
    const Grid& grid = y.grid();
    const InteriorValues d4 = fd_fourth_derivative(y);
    const GridFunction ky = apply_kernel(problem.k(), y);

    CheckBuilder diff("differential_inequality", tol);
    for (std::size_t j = d4.first; j <= d4.last; ++j) {
        const double f = problem.eval_f(j, grid.x(j), y[j], ky[j]);
        diff.record(j, grid.x(j), side * (d4.values[j] - f));
    }

    const std::size_t n = y.size() - 1;
    const double bd_tol = std::max(tol, 10.0 * grid.h());
    CheckBuilder v0("value_at_0", tol);
    CheckBuilder v1("value_at_1", tol);
    CheckBuilder s0("second_derivative_at_0", bd_tol);
    CheckBuilder s1("second_derivative_at_1", bd_tol);
    v0.record(0, 0.0, side * y[0]);
    v1.record(n, 1.0, side * y[n]);
    s0.record(0, 0.0, -side * one_sided_second_difference(y, End::left));
    s1.record(n, 1.0, -side * one_sided_second_difference(y, End::right));

    return assemble(side > 0 ? "lower" : "upper", tol,
                    {diff.finish(), v0.finish(), v1.finish(), s0.finish(), s1.finish()});
}

}  // namespace

// -- NonlinearIDE -------------------------------------------------------------

NonlinearIDE::NonlinearIDE(Function f, BivariateKernel k, double M, double N)
    : f_(std::move(f)), k_(std::move(k)), M_(M), N_(N) {
    if (!f_) {
        throw UsageError("NonlinearIDE needs a right-hand side f");
    }
    if (k_.min() < -kKernelSignTol) {
        throw DomainError("kernel must be nonnegative, min = " + num(k_.min()));
    }
    const double c1 = critical_constants().c1;
    if (!(M_ > 0.0 && M_ < c1)) {
        throw DomainError("M = " + num(M_) + " is outside (0, c1) with c1 = 125.137");
    }
    if (!(N_ > 0.0)) {
        throw DomainError("N = " + num(N_) + " must be positive");
    }
    green_ = std::make_shared<const GreenOperator>(GreenParams(M_), k_.grid());
    contraction_.k_sup = k_.sup_abs();
    contraction_.g_max = green_->integral_max();
    contraction_.d = N_ * contraction_.k_sup * contraction_.g_max;
    contraction_.satisfied = contraction_.d < 1.0;
    if (!contraction_.satisfied) {
        throw ContractionError(contraction_.d, "contraction condition violated: d = " + num(contraction_.d));
    }
}

double NonlinearIDE::eval_f(std::size_t node, double x, double u, double v) const {
    double value = 0.0;
    try {
        value = f_(x, u, v);
    } catch (const ExpressionFault& e) {
        throw EvaluationError(node, x, std::string(e.what()) + " evaluating f at node " + std::to_string(node) +
                                           " (x = " + num(x) + ")");
    }
    if (!std::isfinite(value)) {
        throw EvaluationError(node, x, "f is not finite at node " + std::to_string(node) + " (x = " + num(x) + ")");
    }
    return value;
}

SectorPair::SectorPair(GridFunction a, GridFunction b) : alpha(std::move(a)), beta(std::move(b)) {
    require_same_grid(alpha.grid(), beta.grid(), "SectorPair");
    const double worst = (alpha.values() - beta.values()).maxCoeff();
    if (worst > kOrderTol) {
        throw DomainError("lower and upper solutions are not ordered: alpha exceeds beta by " + num(worst));
    }
}

// -- E and the checks ---------------------------------------------------------

GridFunction evaluate_E(const NonlinearIDE& problem, const GridFunction& sigma) {
    require_same_grid(problem.grid(), sigma.grid(), "evaluate_E");
    const GridFunction ks = apply_kernel(problem.k(), sigma);
    const Grid& grid = sigma.grid();
    Eigen::VectorXd e(static_cast<Eigen::Index>(sigma.size()));
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        e[static_cast<Eigen::Index>(j)] = problem.eval_f(j, grid.x(j), sigma[j], ks[j]) + problem.M() * sigma[j] -
                                          problem.N() * ks[j];
    }
    return GridFunction(grid, std::move(e));
}

VerificationReport verify_lower(const NonlinearIDE& problem, const GridFunction& alpha, double tol) {
    return verify_side(problem, alpha, tol, +1);
}

VerificationReport verify_upper(const NonlinearIDE& problem, const GridFunction& beta, double tol) {
    return verify_side(problem, beta, tol, -1);
}

VerificationReport verify_sector_condition(const NonlinearIDE& problem, const SectorPair& sector,
                                           std::size_t samples, std::uint64_t seed, double tol) {
    require_same_grid(problem.grid(), sector.alpha.grid(), "verify_sector_condition");
    const Grid& grid = problem.grid();
    const GridFunction& lo_u = sector.alpha;
    const GridFunction& hi_u = sector.beta;
    const GridFunction lo_v = apply_kernel(problem.k(), lo_u);
    const GridFunction hi_v = apply_kernel(problem.k(), hi_u);
    const double M = problem.M();
    const double N = problem.N();

    CheckBuilder check("sector_condition", tol);
    auto test = [&](std::size_t j, double u1, double u2, double v1, double v2) {
        const double x = grid.x(j);
        const double lhs = problem.eval_f(j, x, u2, v2) - problem.eval_f(j, x, u1, v1);
        const double rhs = -M * (u2 - u1) + N * (v2 - v1);
        check.record(j, x, rhs - lhs, std::array<double, 4>{u1, u2, v1, v2});
    };

    for (std::size_t j = 0; j < grid.size(); ++j) {
        const std::array<std::array<double, 2>, 3> u_pairs = {
            {{lo_u[j], lo_u[j]}, {lo_u[j], hi_u[j]}, {hi_u[j], hi_u[j]}}};
        const std::array<std::array<double, 2>, 3> v_pairs = {
            {{lo_v[j], lo_v[j]}, {lo_v[j], hi_v[j]}, {hi_v[j], hi_v[j]}}};
        for (const auto& u : u_pairs) {
            for (const auto& v : v_pairs) {
                test(j, u[0], u[1], v[0], v[1]);
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_node(0, grid.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t j = pick_node(rng);
        double u1 = lo_u[j] + (hi_u[j] - lo_u[j]) * unit(rng);
        double u2 = lo_u[j] + (hi_u[j] - lo_u[j]) * unit(rng);
        double v1 = lo_v[j] + (hi_v[j] - lo_v[j]) * unit(rng);
        double v2 = lo_v[j] + (hi_v[j] - lo_v[j]) * unit(rng);
        if (u1 > u2) std::swap(u1, u2);
        if (v1 > v2) std::swap(v1, v2);
        test(j, u1, u2, v1, v2);
    }

    VerificationReport r = assemble("sector", tol, {check.finish()});
    r.samples = samples;
    r.seed = seed;
    return r;
}

// -- Phi ----------------------------------------------------------------------

PhiOperator::PhiOperator(const NonlinearIDE& problem)
    : problem_(&problem), nystrom_(problem.green_ptr(), problem.N(), problem.k()) {}

GridFunction PhiOperator::operator()(const GridFunction& sigma) const {
    return nystrom_.solve(evaluate_E(*problem_, sigma));
}

GridFunction PhiOperator::solve_linear_picard(const GridFunction& rhs, double tol) const {
    LinearIDE lin{problem_->M(), problem_->N(), problem_->k(), rhs};
    const DiscreteLinearProblem dp(std::move(lin), problem_->green_ptr());
    return picard_solve(dp, tol).solution;
}

// -- iteration ----------------------------------------------------------------

HypothesisReports verify_hypotheses(const NonlinearIDE& problem, const SectorPair& sector,
                                    const MonotoneOptions& options) {
    return HypothesisReports{verify_lower(problem, sector.alpha, options.inequality_tol),
                             verify_upper(problem, sector.beta, options.inequality_tol),
                             verify_sector_condition(problem, sector, options.samples, options.seed,
                                                     options.sector_tol)};
}

namespace {

double sup_residual(const NonlinearIDE& problem, const GridFunction& y) { return residual(problem, y).sup_abs(); }

// Largest amount by which prev_a <= a <= b <= prev_b fails at any node.
double chain_violation(const GridFunction& prev_a, const GridFunction& a, const GridFunction& b,
                       const GridFunction& prev_b) {
    const double v1 = (prev_a.values() - a.values()).maxCoeff();
    const double v2 = (a.values() - b.values()).maxCoeff();
    const double v3 = (b.values() - prev_b.values()).maxCoeff();
    return std::max({0.0, v1, v2, v3});
}

}  // namespace

ExtremalResult monotone_iterate(const NonlinearIDE& problem, const SectorPair& sector, const Grid& grid,
                                const MonotoneOptions& options) {
    require_same_grid(problem.grid(), grid, "monotone_iterate");
    require_same_grid(grid, sector.alpha.grid(), "monotone_iterate");

    ExtremalResult result;
    result.verification = verify_hypotheses(problem, sector, options);
    if (!result.verification.passed()) {
        if (!options.force) {
            throw HypothesisFailure("lower/upper solution or sector verification failed", std::move(result));
        }
        result.forced = true;
    }

    const PhiOperator phi(problem);
    IterationReport& rep = result.report;
    result.alpha_chain.push_back(sector.alpha);
    result.beta_chain.push_back(sector.beta);
    rep.gap_history.push_back(sup_distance(sector.beta, sector.alpha));

    for (int n = 1; n <= options.max_iter; ++n) {
        const GridFunction ea = evaluate_E(problem, result.alpha_chain.back());
        const GridFunction eb = evaluate_E(problem, result.beta_chain.back());
        GridFunction a = phi.solve_linear(ea);
        GridFunction b = phi.solve_linear(eb);

        const double violation = chain_violation(result.alpha_chain.back(), a, b, result.beta_chain.back());
        const StepSizes step{sup_distance(a, result.alpha_chain.back()), sup_distance(b, result.beta_chain.back())};
        const bool last = step.alpha <= options.tol && step.beta <= options.tol;
        if (options.crosscheck_every > 0 && (n % options.crosscheck_every == 0 || last)) {
            const double scale = std::max({1.0, sup_norm(a), sup_norm(b)});
            const double diff = std::max(sup_distance(a, phi.solve_linear_picard(ea, 1e-13 * scale)),
                                         sup_distance(b, phi.solve_linear_picard(eb, 1e-13 * scale)));
            ++rep.crosschecks;
            rep.crosscheck_difference = std::max(rep.crosscheck_difference, diff);
            if (diff > 1e-9 * scale) {
                const std::string msg = "Nystrom and Picard disagree by " + num(diff) + " at iteration " +
                                        std::to_string(n);
                throw CrossCheckFailure(msg, std::move(result));
            }
        }

        rep.monotonicity_violation = std::max(rep.monotonicity_violation, violation);
        rep.step_history.push_back(step);
        rep.gap_history.push_back(sup_distance(b, a));
        result.alpha_chain.push_back(std::move(a));
        result.beta_chain.push_back(std::move(b));
        rep.iterations = n;

        if (violation > kBreachTol) {
            const std::string msg = "monotone chain ordering violated by " + num(violation) + " at iteration " +
                                    std::to_string(n);
            throw MonotonicityBreach(msg, std::move(result), n, violation);
        }
        if (last) {
            rep.converged = true;
            break;
        }
    }

    rep.residual_min = sup_residual(problem, result.y_min());
    rep.residual_max = sup_residual(problem, result.y_max());
    if (!rep.converged) {
        throw NonConvergence("monotone iteration did not converge in " + std::to_string(options.max_iter) +
                                 " iterations",
                             std::move(result));
    }
    return result;
}

InteriorValues residual(const NonlinearIDE& problem, const GridFunction& y) {
    require_same_grid(problem.grid(), y.grid(), "residual");
    InteriorValues d4 = fd_fourth_derivative(y);
    const GridFunction ky = apply_kernel(problem.k(), y);
    const Grid& grid = y.grid();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(y.size()));
    for (std::size_t j = d4.first; j <= d4.last; ++j) {
        r[static_cast<Eigen::Index>(j)] = d4.values[j] - problem.eval_f(j, grid.x(j), y[j], ky[j]);
    }
    return InteriorValues{GridFunction(grid, std::move(r)), d4.first, d4.last};
}

}  // namespace beamide
