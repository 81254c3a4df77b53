#pragma once

// Linear nonlocal problem
//     y'''' + M y - N int_0^1 k(x,t) y(t) dt = p(x),
//     y(0) = A, y(1) = B, y''(0) = C, y''(1) = D,
// solved three ways on one shared discretization: Picard iteration of the
// fixed-point map K, the resolvent-kernel representation, and a dense
// Nystrom solve. Plus the contraction and maximum-principle certificates.

#include "beamide/kernels.hpp"
#include "beamide/numgrid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace beamide {

struct LinearIDE {
    double M = 1.0;
    double N = 0.0;
    BivariateKernel k;
    GridFunction p;
    BoundaryData bd{};
    GreenFormula formula = GreenFormula::plus_m;
};

struct ContractionCertificate {
    double k_sup = 0.0;  ///< max |k| over the tabulation
    double g_max = 0.0;  ///< max_x int G(x,s) ds
    double d = 0.0;      ///< |N| k_sup g_max
    bool satisfied = false;
};

enum class SignClass { nonneg, nonpos, mixed };
enum class PrinciplePattern { case_i, case_ii, neither };

const char* to_string(SignClass s) noexcept;
const char* to_string(PrinciplePattern p) noexcept;

/// Which hypotheses of the maximum principle hold. Values within 1e-12 of
/// zero count as both nonnegative and nonpositive.
struct SignCertificate {
    SignClass p_sign = SignClass::mixed;
    PrinciplePattern bd_pattern = PrinciplePattern::neither;
    bool Nk_nonneg = false;
    bool M_below_c1 = false;
    bool contraction = false;
    bool applicable = false;
    /// Case promised when applicable: case_i gives y >= 0, case_ii gives y <= 0.
    PrinciplePattern promised = PrinciplePattern::neither;
};

/// A LinearIDE bound to its discretized Green operator. Building one
/// tabulates G once; every solver below can share it.
class DiscreteLinearProblem {
public:
    DiscreteLinearProblem(const LinearIDE& problem, const Grid& grid);
    DiscreteLinearProblem(LinearIDE problem, std::shared_ptr<const GreenOperator> green);

    const LinearIDE& problem() const noexcept { return problem_; }
    const Grid& grid() const noexcept { return green_->grid(); }
    const GreenOperator& green() const noexcept { return *green_; }
    std::shared_ptr<const GreenOperator> green_ptr() const noexcept { return green_; }

    const ContractionCertificate& contraction() const noexcept { return contraction_; }

    /// N * Ghat * Khat: the discrete map y -> N int G(x,s) int k(s,t) y(t) dt ds.
    const Eigen::MatrixXd& nonlocal() const noexcept { return nonlocal_; }

    /// int G p + h, the affine part of K and the Picard starting point.
    const GridFunction& base() const noexcept { return base_; }
    const GridFunction& lift() const noexcept { return lift_; }

private:
    void init();

    LinearIDE problem_;
    std::shared_ptr<const GreenOperator> green_;
    ContractionCertificate contraction_;
    Eigen::MatrixXd nonlocal_;
    GridFunction lift_;
    GridFunction base_;
};

ContractionCertificate contraction_certificate(const LinearIDE& problem, const Grid& grid);

struct PicardResult {
    GridFunction solution;
    int iterations = 0;
    /// sup |y_n - y_{n-1}| for n = 1..iterations.
    std::vector<double> gap_history;
};

/// 10 * ceil(log(tol)/log(d)), clamped to [50, 10000].
int default_picard_budget(double tol, double d);

/// Throws ContractionError if d >= 1, ConvergenceError past max_iter.
PicardResult picard_solve(const DiscreteLinearProblem& dp, double tol = 1e-10, int max_iter = 0);
PicardResult picard_solve(const LinearIDE& problem, const Grid& grid, double tol = 1e-10, int max_iter = 0);

struct ResolventResult {
    BivariateKernel Q;  ///< sum of the iterated kernels R^(i)
    BivariateKernel F;  ///< int Q(x,t) G(t,s) dt
    /// ||R^(i)||_inf for i = 1..truncation_index.
    std::vector<double> term_norms;
    int truncation_index = 0;
};

/// Sums R^(i) until ||R^(i)|| <= tol (1 - d). Throws ContractionError if d >= 1.
ResolventResult resolvent_kernel(const DiscreteLinearProblem& dp, double tol = 1e-10);
ResolventResult resolvent_kernel(const LinearIDE& problem, const Grid& grid, double tol = 1e-10);

/// y = int G p + h + int Q h + int F p.
GridFunction solve_via_resolvent(const DiscreteLinearProblem& dp, const ResolventResult& r);
GridFunction solve_via_resolvent(const DiscreteLinearProblem& dp, double tol = 1e-10);
GridFunction solve_via_resolvent(const LinearIDE& problem, const Grid& grid, double tol = 1e-10);

/// LU factorization of I - N Ghat Khat, reusable for any forcing and boundary data.
class NystromFactorization {
public:
    /// Throws SingularError if the estimated condition number exceeds 1e12.
    NystromFactorization(std::shared_ptr<const GreenOperator> green, double N, const BivariateKernel& k);

    GridFunction solve(const GridFunction& p, const BoundaryData& bd = {}) const;
    double condition() const noexcept { return condition_; }
    const GreenOperator& green() const noexcept { return *green_; }

private:
    std::shared_ptr<const GreenOperator> green_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_ = 0.0;
};

struct NystromResult {
    GridFunction solution;
    double condition = 0.0;
};

NystromResult nystrom_solve(const DiscreteLinearProblem& dp);
NystromResult nystrom_solve(const LinearIDE& problem, const Grid& grid);

SignCertificate max_principle_certificate(const DiscreteLinearProblem& dp);
SignCertificate max_principle_certificate(const LinearIDE& problem, const Grid& grid);

/// Residual of y'''' + sigma M y - N int k y - p relative to sup|p|, nodes 2..n-2.
double linear_residual(const DiscreteLinearProblem& dp, const GridFunction& y);

}  // namespace beamide
