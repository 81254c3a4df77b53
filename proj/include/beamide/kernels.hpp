#pragma once

// Green's function of the fourth-order operator with Navier conditions, the
// boundary functions w and chi, the boundary lift h, and integral bounds on G.

#include "beamide/numgrid.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>

namespace beamide {

struct CriticalConstants {
    double c0;  ///< upper end of the positivity range of G
    double c1;  ///< upper end of the range where w >= 0 and chi <= 0
};

/// Imported literals: c0 = 950.8843, c1 = 125.137.
constexpr CriticalConstants critical_constants() noexcept { return {950.8843, 125.137}; }

/// Which closed form to evaluate.
///
/// `plus_m` is the inverse of y'''' + M y and is what the solvers use.
/// `minus_m` is the two-branch sin/sinh expression
///     G = [sin(mx)sin(m(1-s))/(m sin m) - sinh(mx)sinh(m(1-s))/(m sinh m)] / (2m^2),  x <= s,
/// which inverts y'''' - M y; it is singular at m = k*pi and changes sign once
/// M exceeds pi^4.
enum class GreenFormula { plus_m, minus_m };

/// Sign of the M-term in the operator a formula inverts by construction.
constexpr int nominal_sign(GreenFormula f) noexcept { return f == GreenFormula::plus_m ? +1 : -1; }

const char* to_string(GreenFormula f) noexcept;

class GreenParams {
public:
    /// Throws DomainError if M is outside (0, c0], SingularError if the
    /// formula is singular at m = M^(1/4).
    explicit GreenParams(double M, GreenFormula formula = GreenFormula::plus_m);

    double M() const noexcept { return M_; }
    double m() const noexcept { return m_; }
    GreenFormula formula() const noexcept { return formula_; }

private:
    double M_;
    double m_;
    GreenFormula formula_;
};

struct BoundaryData {
    double A = 0.0;  ///< y(0)
    double B = 0.0;  ///< y(1)
    double C = 0.0;  ///< y''(0)
    double D = 0.0;  ///< y''(1)
};

double green_navier(const GreenParams& params, double x, double s);

/// Tabulation of G with its branch-split quadrature operator.
BivariateKernel tabulate_green(const GreenParams& params, const Grid& grid);

/// Outcome of checking y'''' + sigma*M*y = p for y = int G p by finite
/// differences, for both signs, with p = sin(pi x) and p = x(1-x).
struct SignValidation {
    int sigma = 0;                  ///< selected sign
    double residual_plus = 0.0;     ///< worst relative residual with sigma = +1
    double residual_minus = 0.0;    ///< worst relative residual with sigma = -1
    double tolerance = 2e-3;
    double probe_M = 0.0;           ///< M at which the decision was made
    bool discriminating = true;     ///< false if both signs passed at the problem's M
    bool matches_nominal = true;    ///< sigma == nominal_sign(formula)
};

/// Runs on an internal 200-panel grid. Throws SingularError if neither sign
/// satisfies the identity.
SignValidation validate_operator_sign(const GreenParams& params);

/// Residual of y'''' + sigma*M*y - p relative to sup|p| (or to the larger of
/// sup|y''''| and sup|M y| when p = 0) on nodes 2..n-2.
double operator_residual(const GridFunction& y, const GridFunction& p, double M, int sigma);

/// w and chi in closed form: coefficients on a fundamental basis of the
/// homogeneous equation y'''' + sigma*M*y = 0, fitted by a 4x4 solve.
class HomogeneousSolutions {
public:
    HomogeneousSolutions(const GreenParams& params, int sigma);

    /// derivative: 0 (value) or 2 (second derivative).
    double w(double x, int derivative = 0) const { return eval(w_coeff_, x, derivative); }
    double chi(double x, int derivative = 0) const { return eval(chi_coeff_, x, derivative); }

    int sigma() const noexcept { return sigma_; }
    /// 2-norm condition number of the boundary-condition matrix.
    double condition() const noexcept { return condition_; }

private:
    double basis(int index, double x, int derivative) const;
    double eval(const std::array<double, 4>& c, double x, int derivative) const;

    double m_;
    int sigma_;
    std::array<double, 4> w_coeff_{};
    std::array<double, 4> chi_coeff_{};
    double condition_;
};

GridFunction boundary_w(const GreenParams& params, const Grid& grid);
GridFunction boundary_chi(const GreenParams& params, const Grid& grid);
GridFunction boundary_lift(const GreenParams& params, const BoundaryData& bd, const Grid& grid);

double green_integral_max(const GreenParams& params, const Grid& grid);

/// Everything a solve needs from this module, computed once per (params, grid).
class GreenOperator {
public:
    GreenOperator(const GreenParams& params, const Grid& grid);

    const GreenParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return green_.grid(); }
    const BivariateKernel& green() const noexcept { return green_; }
    const SignValidation& sign() const noexcept { return sign_; }
    const HomogeneousSolutions& homogeneous() const noexcept { return homogeneous_; }

    const GridFunction& w() const noexcept { return w_; }
    const GridFunction& chi() const noexcept { return chi_; }
    GridFunction lift(const BoundaryData& bd) const;

    /// int_0^1 G(x_i,s) p(s) ds at every node.
    GridFunction apply(const GridFunction& p) const { return apply_kernel(green_, p); }

    /// max_i int_0^1 G(x_i,s) ds and the node where it is attained.
    double integral_max() const noexcept { return integral_max_; }
    std::size_t integral_argmax() const noexcept { return integral_argmax_; }

private:
    GreenParams params_;
    BivariateKernel green_;
    SignValidation sign_;
    HomogeneousSolutions homogeneous_;
    GridFunction w_;
    GridFunction chi_;
    double integral_max_ = 0.0;
    std::size_t integral_argmax_ = 0;
};

}  // namespace beamide
