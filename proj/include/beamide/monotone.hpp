#pragma once

// Monotone iteration for the nonlinear problem
//     y'''' = f(x, y(x), int_0^1 k(x,t) y(t) dt),   Navier conditions,
// between an ordered lower/upper solution pair. Each step applies
// Phi = T o E with
//     E(s) = f(x, s, int k s) + M s - N int k s,
//     T    = inverse of y'''' + M y - N int k y with homogeneous data,
// starting one chain from alpha and one from beta.

#include "beamide/errors.hpp"
#include "beamide/kernels.hpp"
#include "beamide/linsolve.hpp"
#include "beamide/numgrid.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace beamide {

/// f(x, u, v), k, M and N, bound to the Green operator on k's grid.
/// Sufficient (not required) conditions for the sector check:
/// df/du >= -M and df/dv >= N on the sector.
class NonlinearIDE {
public:
    using Function = std::function<double(double x, double u, double v)>;

    /// Throws DomainError unless min k >= -1e-12, 0 < M < c1 and N > 0;
    /// ContractionError unless N ||k|| max int G < 1.
    NonlinearIDE(Function f, BivariateKernel k, double M, double N);

    const Function& f() const noexcept { return f_; }
    const BivariateKernel& k() const noexcept { return k_; }
    double M() const noexcept { return M_; }
    double N() const noexcept { return N_; }
    const Grid& grid() const noexcept { return k_.grid(); }

    const GreenOperator& green() const noexcept { return *green_; }
    std::shared_ptr<const GreenOperator> green_ptr() const noexcept { return green_; }
    const ContractionCertificate& contraction() const noexcept { return contraction_; }

    /// f at node j; wraps failures and non-finite values in EvaluationError.
    double eval_f(std::size_t node, double x, double u, double v) const;

private:
    Function f_;
    BivariateKernel k_;
    double M_;
    double N_;
    std::shared_ptr<const GreenOperator> green_;
    ContractionCertificate contraction_;
};

/// Ordered pair alpha <= beta (within 1e-12; DomainError otherwise).
struct SectorPair {
    SectorPair(GridFunction alpha, GridFunction beta);

    GridFunction alpha;
    GridFunction beta;
};

struct ViolationSite {
    std::size_t node = 0;
    double x = 0.0;
    double violation = 0.0;
    /// Sector samples only: the tuple (u1, u2, v1, v2).
    std::optional<std::array<double, 4>> tuple;
};

struct CheckResult {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;  ///< 0 when the inequality holds everywhere
    double tolerance = 0.0;
    std::vector<ViolationSite> sites;  ///< worst offenders, at most 10
};

/// passed <=> every check's worst_violation <= its tolerance. The boundary
/// second-derivative checks carry the looser tolerance max(tol, 10h).
struct VerificationReport {
    std::string kind;  ///< "lower", "upper" or "sector"
    bool passed = true;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    std::vector<CheckResult> checks;
    std::size_t samples = 0;   ///< sector only
    std::uint64_t seed = 0;    ///< sector only
};

constexpr double kDefaultInequalityTol = 1e-5;
constexpr double kDefaultSectorTol = 1e-10;

GridFunction evaluate_E(const NonlinearIDE& problem, const GridFunction& sigma);

VerificationReport verify_lower(const NonlinearIDE& problem, const GridFunction& alpha,
                                double tol = kDefaultInequalityTol);
VerificationReport verify_upper(const NonlinearIDE& problem, const GridFunction& beta,
                                double tol = kDefaultInequalityTol);

/// Samples tuples at random nodes with u1 <= u2 in [alpha, beta] and
/// v1 <= v2 in [int k alpha, int k beta], plus the nine ordered corner tuples at
/// every node, and checks
///     f(x,u2,v2) - f(x,u1,v1) >= -M (u2 - u1) + N (v2 - v1) - tol.
VerificationReport verify_sector_condition(const NonlinearIDE& problem, const SectorPair& sector,
                                           std::size_t samples = 10000, std::uint64_t seed = 42,
                                           double tol = kDefaultSectorTol);

/// Phi = T o E with T factored once.
class PhiOperator {
public:
    explicit PhiOperator(const NonlinearIDE& problem);

    GridFunction operator()(const GridFunction& sigma) const;

    /// T applied to the given right-hand side by Nystrom.
    GridFunction solve_linear(const GridFunction& rhs) const { return nystrom_.solve(rhs); }
    /// Same by Picard iteration, for cross-checking.
    GridFunction solve_linear_picard(const GridFunction& rhs, double tol) const;

    const NonlinearIDE& problem() const noexcept { return *problem_; }

private:
    const NonlinearIDE* problem_;
    NystromFactorization nystrom_;
};

struct StepSizes {
    double alpha = 0.0;  ///< sup |alpha_n - alpha_{n-1}|
    double beta = 0.0;   ///< sup |beta_n - beta_{n-1}|
};

struct IterationReport {
    int iterations = 0;
    /// sup |beta_n - alpha_n| for n = 0..iterations.
    std::vector<double> gap_history;
    /// For n = 1..iterations.
    std::vector<StepSizes> step_history;
    /// Worst node-wise violation of alpha_{n-1} <= alpha_n <= beta_n <= beta_{n-1}.
    double monotonicity_violation = 0.0;
    double residual_min = 0.0;
    double residual_max = 0.0;
    bool converged = false;
    int crosschecks = 0;
    double crosscheck_difference = 0.0;  ///< worst sup distance Nystrom vs Picard
};

struct MonotoneOptions {
    double tol = 1e-8;
    int max_iter = 200;
    bool force = false;
    double inequality_tol = kDefaultInequalityTol;
    double sector_tol = kDefaultSectorTol;
    std::size_t samples = 10000;
    std::uint64_t seed = 42;
    /// Picard cross-check of the linear solves every this many steps and on the last one.
    int crosscheck_every = 10;
};

struct HypothesisReports {
    VerificationReport lower;
    VerificationReport upper;
    VerificationReport sector;

    bool passed() const noexcept { return lower.passed && upper.passed && sector.passed; }
};

struct ExtremalResult {
    HypothesisReports verification;
    bool forced = false;  ///< iteration ran although a verification failed
    std::vector<GridFunction> alpha_chain;  ///< alpha_0 .. alpha_n
    std::vector<GridFunction> beta_chain;   ///< beta_0 .. beta_n
    IterationReport report;

    const GridFunction& y_min() const { return alpha_chain.back(); }
    const GridFunction& y_max() const { return beta_chain.back(); }
};

/// A failed run. `partial()` holds whatever was computed before the failure.
class IterationFailure : public MathError {
public:
    IterationFailure(const std::string& what, ExtremalResult partial)
        : MathError(what), partial_(std::make_shared<const ExtremalResult>(std::move(partial))) {}
    const ExtremalResult& partial() const noexcept { return *partial_; }

private:
    std::shared_ptr<const ExtremalResult> partial_;
};

/// A verification failed and force was not set.
class HypothesisFailure : public IterationFailure {
public:
    using IterationFailure::IterationFailure;
};

/// The chain ordering broke by more than 1e-8.
class MonotonicityBreach : public IterationFailure {
public:
    MonotonicityBreach(const std::string& what, ExtremalResult partial, int iteration, double violation)
        : IterationFailure(what, std::move(partial)), iteration_(iteration), violation_(violation) {}
    int iteration() const noexcept { return iteration_; }
    double violation() const noexcept { return violation_; }

private:
    int iteration_;
    double violation_;
};

/// max_iter reached before both step sizes dropped to tol.
class NonConvergence : public IterationFailure {
public:
    using IterationFailure::IterationFailure;
};

/// Nystrom and Picard disagree on a linear solve.
class CrossCheckFailure : public IterationFailure {
public:
    using IterationFailure::IterationFailure;
};

HypothesisReports verify_hypotheses(const NonlinearIDE& problem, const SectorPair& sector,
                                    const MonotoneOptions& options = {});

ExtremalResult monotone_iterate(const NonlinearIDE& problem, const SectorPair& sector, const Grid& grid,
                                const MonotoneOptions& options = {});

/// y'''' - f(x, y, int k y) at nodes 2..n-2; zero at the excluded nodes.
InteriorValues residual(const NonlinearIDE& problem, const GridFunction& y);

}  // namespace beamide
