#include "beamide/errors.hpp"
#include "beamide/linsolve.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace beamide;
using oracle::pi;

namespace {

const Grid& grid200() {
    static const Grid g(200);
    return g;
}

GridFunction sin_pi(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
}

BivariateKernel ex41_kernel(const Grid& g) {
    return BivariateKernel::smooth(g, [](double x, double t) { return std::sin(pi * x) * t; });
}

LinearIDE manufactured(const Grid& g) {
    const double c = std::pow(pi, 4) + 1.0 - 0.1 / pi;
    return LinearIDE{1.0, 0.1, ex41_kernel(g), GridFunction::sample(g, [&](double x) { return c * std::sin(pi * x); })};
}

BivariateKernel ones(const Grid& g) {
    return BivariateKernel::smooth(g, [](double, double) { return 1.0; });
}

}  // namespace

TEST_CASE("contraction certificate") {
    const Grid& g = grid200();
    const LinearIDE none{1.0, 0.0, ex41_kernel(g), GridFunction::zero(g)};
    const ContractionCertificate c0 = contraction_certificate(none, g);
    CHECK(c0.d == 0.0);
    CHECK(c0.satisfied);

    const LinearIDE ex41{2.0 / pi, 0.4, ex41_kernel(g), GridFunction::zero(g)};
    const ContractionCertificate c = contraction_certificate(ex41, g);
    CHECK(c.k_sup == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.g_max == doctest::Approx(oracle::green_integral_series(2.0 / pi, 0.5)).epsilon(1e-8));
    CHECK(c.d == doctest::Approx(0.4 * c.g_max));
    CHECK(c.satisfied);

    const BivariateKernel tri = BivariateKernel::diagonal_kink(
        g, [](double x, double t) { return t * (1 - x); }, [](double x, double t) { return x * (1 - t); });
    CHECK(contraction_certificate(LinearIDE{1.0, 1.0, tri, GridFunction::zero(g)}, g).k_sup == 0.25);

    const LinearIDE negative{2.0 / pi, -0.4, ex41_kernel(g), GridFunction::zero(g)};
    CHECK(contraction_certificate(negative, g).d == doctest::Approx(c.d));

    CHECK_THROWS_AS(contraction_certificate(LinearIDE{1000.0, 0.1, ex41_kernel(g), GridFunction::zero(g)}, g),
                    DomainError);
}

TEST_CASE("picard") {
    const Grid& g = grid200();
    SUBCASE("zero data") {
        const PicardResult r = picard_solve(LinearIDE{1.0, 0.2, ex41_kernel(g), GridFunction::zero(g)}, g);
        CHECK(r.iterations == 1);
        CHECK(sup_norm(r.solution) == 0.0);
    }
    SUBCASE("manufactured sine") {
        const PicardResult r = picard_solve(manufactured(g), g);
        CHECK(sup_distance(r.solution, sin_pi(g)) <= 2e-3);
    }
    SUBCASE("limit beam") {
        const LinearIDE beam{1e-3, 0.0, ex41_kernel(g), GridFunction::sample(g, [](double) { return 1.0; })};
        const PicardResult r = picard_solve(beam, g);
        CHECK(std::abs(r.solution[100] - 5.0 / 384.0) <= 1e-4);
    }
    SUBCASE("contraction violated") {
        const double d_unit = contraction_certificate(LinearIDE{1.0, 1.0, ones(g), GridFunction::zero(g)}, g).d;
        const LinearIDE bad{1.0, 1.0 / d_unit, ones(g), sin_pi(g)};
        CHECK_THROWS_AS(picard_solve(bad, g), ContractionError);
        try {
            picard_solve(bad, g);
        } catch (const ContractionError& e) {
            CHECK(e.d() == doctest::Approx(1.0));
        }
    }
    SUBCASE("budget exhausted") {
        const DiscreteLinearProblem dp(manufactured(g), g);
        CHECK_THROWS_AS(picard_solve(dp, 1e-14, 1), ConvergenceError);
        try {
            picard_solve(dp, 1e-14, 1);
        } catch (const ConvergenceError& e) {
            CHECK(e.last_gap() > 0.0);
        }
    }
}

TEST_CASE("picard budget") {
    CHECK(default_picard_budget(1e-10, 0.5) == 340);
    CHECK(default_picard_budget(1e-10, 1e-6) == 50);
    CHECK(default_picard_budget(1e-10, 0.9999) == 10000);
    CHECK(default_picard_budget(1e-10, 0.0) == 50);
}

TEST_CASE("picard gaps follow the contraction estimate") {
    std::mt19937_64 rng(5);
    const Grid& g = grid200();
    for (double d : {0.3, 0.7, 0.9}) {
        const DiscreteLinearProblem dp(gen::random_linear(rng, g, d), g);
        const PicardResult r = picard_solve(dp);
        const double d_cert = dp.contraction().d;
        for (std::size_t n = 0; n < r.gap_history.size(); ++n) {
            CHECK(r.gap_history[n] <= std::pow(d_cert, n) * r.gap_history[0] / (1 - d_cert) * (1 + 1e-6));
        }
    }
}

TEST_CASE("resolvent") {
    const Grid& g = grid200();
    SUBCASE("N = 0") {
        const LinearIDE lin{1.0, 0.0, ex41_kernel(g), sin_pi(g), BoundaryData{0.3, -0.2, 0.1, 0.4}};
        const DiscreteLinearProblem dp(lin, g);
        const ResolventResult r = resolvent_kernel(dp);
        CHECK(r.Q.sup_abs() == 0.0);
        CHECK(sup_distance(solve_via_resolvent(dp, r), dp.base()) == 0.0);
    }
    SUBCASE("norm bounds") {
        std::mt19937_64 rng(17);
        for (double d : {0.2, 0.6, 0.9}) {
            const DiscreteLinearProblem dp(gen::random_linear(rng, g, d), g);
            const double dc = dp.contraction().d;
            const ResolventResult r = resolvent_kernel(dp, 1e-10);
            for (std::size_t i = 0; i < r.term_norms.size(); ++i) {
                CHECK(r.term_norms[i] <= std::pow(dc, i + 1) * (1 + 1e-8));
            }
            CHECK(r.Q.sup_abs() <= dc / (1 - dc) + 1e-8);
            CHECK(r.term_norms.back() <= 1e-10 * (1 - dc));
            CHECK(r.truncation_index == static_cast<int>(r.term_norms.size()));
        }
    }
    SUBCASE("separable kernel closed form") {
        for (double N : {5.0, -20.0, 60.0}) {
            const LinearIDE lin{3.0, N, ones(g), sin_pi(g)};
            const DiscreteLinearProblem dp(lin, g);
            const GridFunction gamma = dp.green().apply(GridFunction::sample(g, [](double) { return 1.0; }));
            const double denom = 1.0 - N * integrate(gamma);
            const ResolventResult r = resolvent_kernel(dp, 1e-12);
            double worst = 0.0;
            for (Eigen::Index i = 0; i < r.Q.values().rows(); ++i) {
                for (Eigen::Index j = 0; j < r.Q.values().cols(); ++j) {
                    worst = std::max(worst, std::abs(r.Q.values()(i, j) - N * gamma.values()[i] / denom));
                }
            }
            CHECK(worst <= 1e-8);
        }
    }
    SUBCASE("manufactured sine") {
        CHECK(sup_distance(solve_via_resolvent(manufactured(g), g), sin_pi(g)) <= 2e-3);
    }
    SUBCASE("contraction violated") {
        const double d_unit = contraction_certificate(LinearIDE{1.0, 1.0, ones(g), GridFunction::zero(g)}, g).d;
        CHECK_THROWS_AS(resolvent_kernel(LinearIDE{1.0, 1.5 / d_unit, ones(g), sin_pi(g)}, g), ContractionError);
    }
}

TEST_CASE("nystrom") {
    const Grid& g = grid200();
    const NystromResult zero = nystrom_solve(LinearIDE{1.0, 0.0, ex41_kernel(g), GridFunction::zero(g)}, g);
    CHECK(sup_norm(zero.solution) == 0.0);
    CHECK(zero.condition == doctest::Approx(1.0));

    CHECK(sup_distance(nystrom_solve(manufactured(g), g).solution, sin_pi(g)) <= 2e-3);

    // I - N G K is singular for k = 1 and N int gamma = 1.
    const LinearIDE probe{1.0, 1.0, ones(g), sin_pi(g)};
    const DiscreteLinearProblem dp(probe, g);
    const double int_gamma = integrate(dp.green().apply(GridFunction::sample(g, [](double) { return 1.0; })));
    CHECK_THROWS_AS(nystrom_solve(LinearIDE{1.0, 1.0 / int_gamma, ones(g), sin_pi(g)}, g), SingularError);
}

TEST_CASE("three solvers agree") {
    std::mt19937_64 rng(23);
    const Grid& g = grid200();
    for (int trial = 0; trial < 8; ++trial) {
        const double d = 0.05 + 0.85 * trial / 7.0;
        const DiscreteLinearProblem dp(gen::random_linear(rng, g, d), g);
        const GridFunction yp = picard_solve(dp).solution;
        const GridFunction yr = solve_via_resolvent(dp);
        const GridFunction yn = nystrom_solve(dp).solution;
        CHECK(sup_distance(yp, yn) <= 1e-8 * std::max(1.0, sup_norm(yn)));
        CHECK(sup_distance(yp, yr) <= 1e-6);
        CHECK(sup_distance(yr, yn) <= 1e-6);
    }
}

TEST_CASE("solution map is linear in (p, bd)") {
    std::mt19937_64 rng(29);
    const Grid& g = grid200();
    for (int trial = 0; trial < 5; ++trial) {
        LinearIDE a = gen::random_linear(rng, g, 0.5, false);
        LinearIDE b = gen::random_linear(rng, g, 0.5, false);
        b.M = a.M;
        b.N = a.N;
        b.k = a.k;
        const LinearIDE sum{a.M, a.N, a.k, a.p + b.p,
                            BoundaryData{a.bd.A + b.bd.A, a.bd.B + b.bd.B, a.bd.C + b.bd.C, a.bd.D + b.bd.D}};
        const GridFunction ya = nystrom_solve(a, g).solution;
        const GridFunction yb = nystrom_solve(b, g).solution;
        const GridFunction ys = nystrom_solve(sum, g).solution;
        CHECK(sup_distance(ys, ya + yb) <= 1e-10 * std::max(1.0, sup_norm(ys)));
    }
}

TEST_CASE("homogeneous boundary data gives a residual below 2e-3") {
    std::mt19937_64 rng(31);
    const Grid& g = grid200();
    for (int trial = 0; trial < 5; ++trial) {
        LinearIDE lin = gen::random_linear(rng, g, 0.6);
        lin.bd = {};
        const DiscreteLinearProblem dp(lin, g);
        CHECK(linear_residual(dp, nystrom_solve(dp).solution) <= 2e-3);
    }
    const DiscreteLinearProblem dp(manufactured(g), g);
    CHECK(linear_residual(dp, sin_pi(g)) <= 2e-3);
}

TEST_CASE("maximum principle certificate") {
    const Grid& g = grid200();
    const BivariateKernel xt = BivariateKernel::smooth(g, [](double x, double t) { return x * t; });

    const SignCertificate c1 = max_principle_certificate(LinearIDE{1.0, 0.1, xt, sin_pi(g)}, g);
    CHECK(c1.applicable);
    CHECK(c1.promised == PrinciplePattern::case_i);
    CHECK(c1.p_sign == SignClass::nonneg);
    CHECK(c1.Nk_nonneg);

    const SignCertificate c2 = max_principle_certificate(LinearIDE{1.0, 0.1, xt, -1.0 * sin_pi(g)}, g);
    CHECK(c2.applicable);
    CHECK(c2.promised == PrinciplePattern::case_ii);
    CHECK(c2.p_sign == SignClass::nonpos);

    const SignCertificate big = max_principle_certificate(LinearIDE{200.0, 0.1, xt, sin_pi(g)}, g);
    CHECK_FALSE(big.M_below_c1);
    CHECK_FALSE(big.applicable);

    const SignCertificate negN = max_principle_certificate(LinearIDE{1.0, -0.1, xt, sin_pi(g)}, g);
    CHECK_FALSE(negN.Nk_nonneg);
    CHECK(negN.contraction);
    CHECK_FALSE(negN.applicable);

    const SignCertificate mixed = max_principle_certificate(
        LinearIDE{1.0, 0.1, xt, GridFunction::sample(g, [](double x) { return std::cos(pi * x); })}, g);
    CHECK(mixed.p_sign == SignClass::mixed);
    CHECK_FALSE(mixed.applicable);

    const SignCertificate wrong_bd =
        max_principle_certificate(LinearIDE{1.0, 0.1, xt, sin_pi(g), BoundaryData{-1, 0, 0, 0}}, g);
    CHECK_FALSE(wrong_bd.applicable);

    CHECK(std::string(to_string(PrinciplePattern::case_i)) == "principle-i");
    CHECK(std::string(to_string(PrinciplePattern::case_ii)) == "principle-ii");
}

TEST_CASE("maximum principle holds on random instances") {
    std::mt19937_64 rng(37);
    const Grid& g = grid200();
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteLinearProblem pi_(gen::random_principle_case(rng, g, false), g);
        REQUIRE(max_principle_certificate(pi_).applicable);
        CHECK(nystrom_solve(pi_).solution.values().minCoeff() >= -1e-10);
        const DiscreteLinearProblem pii(gen::random_principle_case(rng, g, true), g);
        REQUIRE(max_principle_certificate(pii).promised == PrinciplePattern::case_ii);
        CHECK(nystrom_solve(pii).solution.values().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("shared green operator") {
    const Grid& g = grid200();
    const auto op = std::make_shared<const GreenOperator>(GreenParams(1.0), g);
    const DiscreteLinearProblem dp(manufactured(g), op);
    CHECK(dp.green_ptr() == op);
    LinearIDE other = manufactured(g);
    other.M = 2.0;
    CHECK_THROWS_AS(DiscreteLinearProblem(other, op), UsageError);
    other = manufactured(g);
    other.p = sin_pi(Grid(100));
    CHECK_THROWS_AS(DiscreteLinearProblem(other, op), UsageError);
}
