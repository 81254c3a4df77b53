#include "beamide/kernels.hpp"

#include "beamide/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace beamide {

namespace {

using cplx = std::complex<double>;

// G(a, b) for a <= b; each branch of the tabulation is this expression with
// the arguments in a fixed order, which keeps it analytic across the diagonal.
double green_core(const GreenParams& p, double a, double b) {
    const double m = p.m();
    if (p.formula() == GreenFormula::plus_m) {
        const cplx kappa = m * std::polar(1.0, std::numbers::pi / 4.0);
        const cplx g = std::sin(kappa * a) * std::sin(kappa * (1.0 - b)) / (kappa * std::sin(kappa));
        return g.imag() / (m * m);
    }
    const double trig = std::sin(m * a) * std::sin(m * (1.0 - b)) / (m * std::sin(m));
    const double hyp = std::sinh(m * a) * std::sinh(m * (1.0 - b)) / (m * std::sinh(m));
    return (trig - hyp) / (2.0 * m * m);
}

constexpr int kValidationPanels = 200;
constexpr double kProbeM = 50.0;

struct SignResiduals {
    double plus;
    double minus;
};

SignResiduals sign_residuals(const GreenParams& params) {
    const Grid grid(kValidationPanels);
    const BivariateKernel g = tabulate_green(params, grid);
    const std::array<GridFunction, 2> forcings = {
        GridFunction::sample(grid, [](double x) { return std::sin(std::numbers::pi * x); }),
        GridFunction::sample(grid, [](double x) { return x * (1.0 - x); }),
    };
    SignResiduals r{0.0, 0.0};
    for (const auto& p : forcings) {
        const GridFunction y = apply_kernel(g, p);
        r.plus = std::max(r.plus, operator_residual(y, p, params.M(), +1));
        r.minus = std::max(r.minus, operator_residual(y, p, params.M(), -1));
    }
    return r;
}

}  // namespace

const char* to_string(GreenFormula f) noexcept { return f == GreenFormula::plus_m ? "plus_m" : "minus_m"; }

GreenParams::GreenParams(double M, GreenFormula formula) : M_(M), m_(std::pow(M, 0.25)), formula_(formula) {
    const double c0 = critical_constants().c0;
    if (!(M > 0.0 && M <= c0)) {
        throw DomainError("M = " + std::to_string(M) + " is outside (0, c0] with c0 = 950.8843");
    }
    if (formula == GreenFormula::minus_m) {
        const double k = std::round(m_ / std::numbers::pi);
        if (k >= 1.0 && std::abs(m_ - k * std::numbers::pi) < 1e-10) {
            throw SingularError("m = M^(1/4) is within 1e-10 of a multiple of pi; sin(m) vanishes");
        }
    }
}

double green_navier(const GreenParams& params, double x, double s) {
    if (!(x >= 0.0 && x <= 1.0 && s >= 0.0 && s <= 1.0)) {
        throw UsageError("green_navier: arguments must lie in [0,1]");
    }
    return green_core(params, std::min(x, s), std::max(x, s));
}

BivariateKernel tabulate_green(const GreenParams& params, const Grid& grid) {
    return BivariateKernel::diagonal_kink(
        grid, [&](double x, double s) { return green_core(params, s, x); },
        [&](double x, double s) { return green_core(params, x, s); });
}

double operator_residual(const GridFunction& y, const GridFunction& p, double M, int sigma) {
    require_same_grid(y.grid(), p.grid(), "operator_residual");
    const InteriorValues d4 = fd_fourth_derivative(y);
    double worst = 0.0;
    double scale = 0.0;
    double fallback = 0.0;
    for (std::size_t j = d4.first; j <= d4.last; ++j) {
        worst = std::max(worst, std::abs(d4.values[j] + sigma * M * y[j] - p[j]));
        scale = std::max(scale, std::abs(p[j]));
        fallback = std::max({fallback, std::abs(d4.values[j]), std::abs(M * y[j])});
    }
    const double denom = scale > 0.0 ? scale : fallback;
    return denom > 0.0 ? worst / denom : worst;
}

SignValidation validate_operator_sign(const GreenParams& params) {
    SignValidation v;
    SignResiduals r = sign_residuals(params);
    v.probe_M = params.M();
    const bool plus_ok = r.plus <= v.tolerance;
    const bool minus_ok = r.minus <= v.tolerance;
    if (plus_ok && minus_ok) {
        // M y is below the finite-difference error; decide at a larger M.
        v.discriminating = false;
        v.probe_M = kProbeM;
        r = sign_residuals(GreenParams(kProbeM, params.formula()));
    }
    v.residual_plus = r.plus;
    v.residual_minus = r.minus;
    const bool plus_pass = r.plus <= v.tolerance;
    const bool minus_pass = r.minus <= v.tolerance;
    if (plus_pass == minus_pass) {
        throw SingularError("sign validation of the Green's function is inconclusive (residuals " +
                            std::to_string(r.plus) + ", " + std::to_string(r.minus) + ")");
    }
    v.sigma = plus_pass ? +1 : -1;
    v.matches_nominal = v.sigma == nominal_sign(params.formula());
    return v;
}

// -- w and chi ----------------------------------------------------------------

HomogeneousSolutions::HomogeneousSolutions(const GreenParams& params, int sigma)
    : m_(params.m()), sigma_(sigma), condition_(0.0) {
    Eigen::Matrix4d a;
    for (int k = 0; k < 4; ++k) {
        a(0, k) = basis(k, 0.0, 0);
        a(1, k) = basis(k, 0.0, 2);
        a(2, k) = basis(k, 1.0, 0);
        a(3, k) = basis(k, 1.0, 2);
    }
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(a);
    const auto& sv = svd.singularValues();
    condition_ = sv[3] > 0.0 ? sv[0] / sv[3] : INFINITY;
    if (!(condition_ < 1e12)) {
        throw SingularError("boundary-condition system for w and chi is singular (condition " +
                            std::to_string(condition_) + ")");
    }
    const Eigen::PartialPivLU<Eigen::Matrix4d> lu(a);
    const Eigen::Vector4d cw = lu.solve(Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
    const Eigen::Vector4d cc = lu.solve(Eigen::Vector4d(0.0, 1.0, 0.0, 0.0));
    for (int k = 0; k < 4; ++k) {
        w_coeff_[static_cast<std::size_t>(k)] = cw[k];
        chi_coeff_[static_cast<std::size_t>(k)] = cc[k];
    }
}

// sigma = +1: real and imaginary parts of exp(lambda x), lambda = b(+-1 + i), b = m/sqrt 2.
// sigma = -1: sin, cos, sinh, cosh of m x.
double HomogeneousSolutions::basis(int index, double x, int derivative) const {
    if (sigma_ > 0) {
        const double b = m_ / std::numbers::sqrt2;
        const cplx lambda = index < 2 ? cplx(b, b) : cplx(-b, b);
        const cplx v = std::pow(lambda, derivative) * std::exp(lambda * x);
        return index % 2 == 0 ? v.real() : v.imag();
    }
    const double scale = derivative == 0 ? 1.0 : m_ * m_;
    switch (index) {
        case 0: return (derivative == 0 ? 1.0 : -scale) * std::sin(m_ * x);
        case 1: return (derivative == 0 ? 1.0 : -scale) * std::cos(m_ * x);
        case 2: return scale * std::sinh(m_ * x);
        default: return scale * std::cosh(m_ * x);
    }
}

double HomogeneousSolutions::eval(const std::array<double, 4>& c, double x, int derivative) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        s += c[static_cast<std::size_t>(k)] * basis(k, x, derivative);
    }
    return s;
}

GridFunction boundary_w(const GreenParams& params, const Grid& grid) {
    const HomogeneousSolutions hs(params, validate_operator_sign(params).sigma);
    return GridFunction::sample(grid, [&](double x) { return hs.w(x); });
}

GridFunction boundary_chi(const GreenParams& params, const Grid& grid) {
    const HomogeneousSolutions hs(params, validate_operator_sign(params).sigma);
    return GridFunction::sample(grid, [&](double x) { return hs.chi(x); });
}

namespace {

GridFunction combine_lift(const GridFunction& w, const GridFunction& chi, const BoundaryData& bd) {
    return w * bd.A + w.reflected() * bd.B + chi * bd.C + chi.reflected() * bd.D;
}

}  // namespace

GridFunction boundary_lift(const GreenParams& params, const BoundaryData& bd, const Grid& grid) {
    const HomogeneousSolutions hs(params, validate_operator_sign(params).sigma);
    return combine_lift(GridFunction::sample(grid, [&](double x) { return hs.w(x); }),
                        GridFunction::sample(grid, [&](double x) { return hs.chi(x); }), bd);
}

double green_integral_max(const GreenParams& params, const Grid& grid) {
    return tabulate_green(params, grid).op().rowwise().sum().maxCoeff();
}

// -- GreenOperator ------------------------------------------------------------

GreenOperator::GreenOperator(const GreenParams& params, const Grid& grid)
    : params_(params),
      green_(tabulate_green(params, grid)),
      sign_(validate_operator_sign(params)),
      homogeneous_(params, sign_.sigma),
      w_(GridFunction::sample(grid, [&](double x) { return homogeneous_.w(x); })),
      chi_(GridFunction::sample(grid, [&](double x) { return homogeneous_.chi(x); })) {
    const Eigen::VectorXd row_sums = green_.op().rowwise().sum();
    Eigen::Index arg = 0;
    integral_max_ = row_sums.maxCoeff(&arg);
    integral_argmax_ = static_cast<std::size_t>(arg);
}

GridFunction GreenOperator::lift(const BoundaryData& bd) const { return combine_lift(w_, chi_, bd); }

}  // namespace beamide
