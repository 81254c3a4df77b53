#include "beamide/linsolve.hpp"

#include "beamide/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beamide {

namespace {

constexpr double kSignTol = 1e-12;
constexpr double kMaxCondition = 1e12;
constexpr int kMaxResolventTerms = 100000;

void require_contraction(const ContractionCertificate& c) {
    if (!c.satisfied) {
        throw ContractionError(c.d, "contraction condition violated: d = |N| ||k|| max int G = " +
                                        std::to_string(c.d) + " >= 1");
    }
}

// max_ij |op_ij / w_j|: the sup norm of a kernel given by its operator.
double kernel_sup(const Eigen::MatrixXd& op, const Eigen::VectorXd& weights) {
    return (op * weights.cwiseInverse().asDiagonal()).cwiseAbs().maxCoeff();
}

}  // namespace

const char* to_string(SignClass s) noexcept {
    switch (s) {
        case SignClass::nonneg: return "nonneg";
        case SignClass::nonpos: return "nonpos";
        default: return "mixed";
    }
}

const char* to_string(PrinciplePattern p) noexcept {
    switch (p) {
        case PrinciplePattern::case_i: return "principle-i";
        case PrinciplePattern::case_ii: return "principle-ii";
        default: return "neither";
    }
}

// -- DiscreteLinearProblem ----------------------------------------------------

DiscreteLinearProblem::DiscreteLinearProblem(const LinearIDE& problem, const Grid& grid)
    : DiscreteLinearProblem(problem,
                            std::make_shared<const GreenOperator>(GreenParams(problem.M, problem.formula), grid)) {}

DiscreteLinearProblem::DiscreteLinearProblem(LinearIDE problem, std::shared_ptr<const GreenOperator> green)
    : problem_(std::move(problem)),
      green_(std::move(green)),
      lift_(GridFunction::zero(green_->grid())),
      base_(GridFunction::zero(green_->grid())) {
    init();
}

void DiscreteLinearProblem::init() {
    require_same_grid(grid(), problem_.k.grid(), "linear problem kernel");
    require_same_grid(grid(), problem_.p.grid(), "linear problem forcing");
    if (green_->params().M() != problem_.M || green_->params().formula() != problem_.formula) {
        throw UsageError("Green operator was built for different parameters");
    }
    contraction_.k_sup = problem_.k.sup_abs();
    contraction_.g_max = green_->integral_max();
    contraction_.d = std::abs(problem_.N) * contraction_.k_sup * contraction_.g_max;
    contraction_.satisfied = contraction_.d < 1.0;

    nonlocal_ = problem_.N * (green_->green().op() * problem_.k.op());
    lift_ = green_->lift(problem_.bd);
    base_ = green_->apply(problem_.p) + lift_;
}

ContractionCertificate contraction_certificate(const LinearIDE& problem, const Grid& grid) {
    return DiscreteLinearProblem(problem, grid).contraction();
}

// -- Picard -------------------------------------------------------------------

int default_picard_budget(double tol, double d) {
    if (!(d > 0.0) || !(d < 1.0)) {
        return 50;
    }
    const double steps = std::ceil(std::log(tol) / std::log(d));
    return static_cast<int>(std::clamp(10.0 * steps, 50.0, 10000.0));
}

PicardResult picard_solve(const DiscreteLinearProblem& dp, double tol, int max_iter) {
    require_contraction(dp.contraction());
    if (max_iter <= 0) {
        max_iter = default_picard_budget(tol, dp.contraction().d);
    }
    const Eigen::VectorXd& base = dp.base().values();
    Eigen::VectorXd y = base;
    PicardResult result{dp.base(), 0, {}};
    for (int n = 1; n <= max_iter; ++n) {
        Eigen::VectorXd next = base + dp.nonlocal() * y;
        const double gap = (next - y).cwiseAbs().maxCoeff();
        result.gap_history.push_back(gap);
        y = std::move(next);
        if (gap <= tol) {
            result.solution = GridFunction(dp.grid(), std::move(y));
            result.iterations = n;
            return result;
        }
    }
    throw ConvergenceError(result.gap_history.back(), "Picard iteration did not reach tol = " + std::to_string(tol) +
                                                          " in " + std::to_string(max_iter) + " steps");
}

PicardResult picard_solve(const LinearIDE& problem, const Grid& grid, double tol, int max_iter) {
    return picard_solve(DiscreteLinearProblem(problem, grid), tol, max_iter);
}

// -- resolvent ----------------------------------------------------------------

ResolventResult resolvent_kernel(const DiscreteLinearProblem& dp, double tol) {
    require_contraction(dp.contraction());
    const double d = dp.contraction().d;
    const Eigen::VectorXd& weights = dp.grid().weights();
    const Eigen::MatrixXd& r1 = dp.nonlocal();

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r1.rows(), r1.cols());
    Eigen::MatrixXd term = r1;
    std::vector<double> norms;
    for (int i = 1;; ++i) {
        q += term;
        norms.push_back(kernel_sup(term, weights));
        if (norms.back() <= tol * (1.0 - d)) {
            break;
        }
        if (i >= kMaxResolventTerms) {
            throw ConvergenceError(norms.back(), "resolvent series did not reach its truncation threshold");
        }
        term = term * r1;
    }
    Eigen::MatrixXd f = q * dp.green().green().op();
    const int index = static_cast<int>(norms.size());
    return ResolventResult{BivariateKernel::from_operator(dp.grid(), std::move(q)),
                           BivariateKernel::from_operator(dp.grid(), std::move(f)), std::move(norms), index};
}

ResolventResult resolvent_kernel(const LinearIDE& problem, const Grid& grid, double tol) {
    return resolvent_kernel(DiscreteLinearProblem(problem, grid), tol);
}

GridFunction solve_via_resolvent(const DiscreteLinearProblem& dp, const ResolventResult& r) {
    const GridFunction& h = dp.lift();
    const GridFunction& p = dp.problem().p;
    return dp.base() + apply_kernel(r.Q, h) + apply_kernel(r.F, p);
}

GridFunction solve_via_resolvent(const DiscreteLinearProblem& dp, double tol) {
    return solve_via_resolvent(dp, resolvent_kernel(dp, tol));
}

GridFunction solve_via_resolvent(const LinearIDE& problem, const Grid& grid, double tol) {
    return solve_via_resolvent(DiscreteLinearProblem(problem, grid), tol);
}

// -- Nystrom ------------------------------------------------------------------

NystromFactorization::NystromFactorization(std::shared_ptr<const GreenOperator> green, double N,
                                           const BivariateKernel& k)
    : green_(std::move(green)) {
    require_same_grid(green_->grid(), k.grid(), "NystromFactorization");
    const auto n = static_cast<Eigen::Index>(green_->grid().size());
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - N * (green_->green().op() * k.op());
    lu_.compute(a);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : INFINITY;
    if (!(condition_ <= kMaxCondition)) {
        throw SingularError("Nystrom matrix I - N G K is singular or nearly so (condition estimate " +
                            std::to_string(condition_) + ")");
    }
}

GridFunction NystromFactorization::solve(const GridFunction& p, const BoundaryData& bd) const {
    const GridFunction rhs = green_->apply(p) + green_->lift(bd);
    return GridFunction(rhs.grid(), lu_.solve(rhs.values()));
}

NystromResult nystrom_solve(const DiscreteLinearProblem& dp) {
    const NystromFactorization f(dp.green_ptr(), dp.problem().N, dp.problem().k);
    return NystromResult{f.solve(dp.problem().p, dp.problem().bd), f.condition()};
}

NystromResult nystrom_solve(const LinearIDE& problem, const Grid& grid) {
    return nystrom_solve(DiscreteLinearProblem(problem, grid));
}

// -- maximum principle --------------------------------------------------------

SignCertificate max_principle_certificate(const DiscreteLinearProblem& dp) {
    const LinearIDE& pr = dp.problem();
    SignCertificate c;

    const bool p_nonneg = pr.p.values().minCoeff() >= -kSignTol;
    const bool p_nonpos = pr.p.values().maxCoeff() <= kSignTol;
    c.p_sign = p_nonneg ? SignClass::nonneg : (p_nonpos ? SignClass::nonpos : SignClass::mixed);

    const BoundaryData& bd = pr.bd;
    const bool bd_i = bd.A >= -kSignTol && bd.B >= -kSignTol && bd.C <= kSignTol && bd.D <= kSignTol;
    const bool bd_ii = bd.A <= kSignTol && bd.B <= kSignTol && bd.C >= -kSignTol && bd.D >= -kSignTol;

    c.Nk_nonneg = (pr.N * pr.k.values()).minCoeff() >= -kSignTol;
    c.M_below_c1 = pr.M < critical_constants().c1;
    c.contraction = dp.contraction().satisfied;

    if (p_nonneg && bd_i) {
        c.promised = PrinciplePattern::case_i;
    } else if (p_nonpos && bd_ii) {
        c.promised = PrinciplePattern::case_ii;
    }
    if (c.promised != PrinciplePattern::neither) {
        c.bd_pattern = c.promised;
    } else {
        c.bd_pattern = bd_i ? PrinciplePattern::case_i : (bd_ii ? PrinciplePattern::case_ii : PrinciplePattern::neither);
    }
    c.applicable = c.Nk_nonneg && c.M_below_c1 && c.contraction && c.promised != PrinciplePattern::neither;
    if (!c.applicable) {
        c.promised = PrinciplePattern::neither;
    }
    return c;
}

SignCertificate max_principle_certificate(const LinearIDE& problem, const Grid& grid) {
    return max_principle_certificate(DiscreteLinearProblem(problem, grid));
}

double linear_residual(const DiscreteLinearProblem& dp, const GridFunction& y) {
    const LinearIDE& pr = dp.problem();
    // Fold the nonlocal term into the forcing: y'''' + sigma M y = p + N int k y.
    const GridFunction rhs = pr.p + pr.N * apply_kernel(pr.k, y);
    return operator_residual(y, rhs, pr.M, dp.green().sign().sigma);
}

}  // namespace beamide
