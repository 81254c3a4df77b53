#include "beamide/errors.hpp"
#include "beamide/numgrid.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace beamide;
using oracle::pi;

namespace {

GridFunction sin_pi(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
}

}  // namespace

TEST_CASE("grid construction") {
    const Grid g = make_grid(4);
    CHECK(g.size() == 5);
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(1) == 0.25);
    CHECK(g.x(2) == 0.5);
    CHECK(g.x(3) == 0.75);
    CHECK(g.x(4) == 1.0);
    CHECK(g.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.weights()[1] == doctest::Approx(4.0 / 12.0));
    CHECK(g.weights()[2] == doctest::Approx(2.0 / 12.0));

    const Grid g200(200);
    CHECK(g200.size() == 201);
    CHECK(g200.h() == doctest::Approx(0.005));
    CHECK(std::abs(g200.weights().sum() - 1.0) <= 1e-14);
    CHECK(g200.weights().minCoeff() > 0.0);

    CHECK_THROWS_AS(make_grid(3), ConfigError);
    CHECK_THROWS_AS(make_grid(2), ConfigError);
    CHECK_THROWS_AS(make_grid(0), ConfigError);
    CHECK_THROWS_AS(make_grid(-4), ConfigError);
}

TEST_CASE("grid functions reject bad values") {
    const Grid g(4);
    CHECK_THROWS_AS(GridFunction(g, Eigen::VectorXd::Zero(4)), UsageError);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
    v[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(GridFunction(g, v), UsageError);
    CHECK_THROWS_AS(GridFunction::zero(g) + GridFunction::zero(Grid(6)), UsageError);
}

TEST_CASE("integrate") {
    const Grid g(200);
    CHECK(integrate(GridFunction::sample(g, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(integrate(sin_pi(g)) - 2.0 / pi) <= 1e-9);
    CHECK(std::abs(integrate(GridFunction::sample(g, [](double x) { return x * std::sin(pi * x); })) - 1.0 / pi) <=
          1e-9);
}

TEST_CASE("integrate is exact on cubics") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> c(-3.0, 3.0);
    for (int n : {4, 10, 200}) {
        const Grid g(n);
        for (int trial = 0; trial < 20; ++trial) {
            const double a = c(rng), b = c(rng), d = c(rng), e = c(rng);
            const GridFunction f =
                GridFunction::sample(g, [&](double x) { return a + b * x + d * x * x + e * x * x * x; });
            CHECK(std::abs(integrate(f) - (a + b / 2 + d / 3 + e / 4)) <= 1e-13);
        }
    }
}

TEST_CASE("integrate converges at fourth order") {
    auto err = [](int n) {
        return integrate(GridFunction::sample(Grid(n), [](double x) { return std::exp(x) * std::cos(3 * x); }));
    };
    double prev = std::abs(err(8) - err(16));
    for (int n = 16; n <= 128; n *= 2) {
        const double next = std::abs(err(n) - err(2 * n));
        CHECK(prev / next >= 8.0);
        prev = next;
    }
}

TEST_CASE("apply_kernel") {
    const Grid g(200);
    const GridFunction y = sin_pi(g);

    const BivariateKernel zero = BivariateKernel::smooth(g, [](double, double) { return 0.0; });
    CHECK(sup_norm(apply_kernel(zero, y)) == 0.0);

    const BivariateKernel k = BivariateKernel::smooth(g, [](double x, double t) { return std::sin(pi * x) * t; });
    CHECK(sup_distance(apply_kernel(k, y), sin_pi(g) * (1.0 / pi)) <= 1e-8);

    const BivariateKernel tri = BivariateKernel::diagonal_kink(
        g, [](double x, double t) { return t * (1.0 - x); }, [](double x, double t) { return x * (1.0 - t); });
    CHECK(tri.structure() == BivariateKernel::Structure::diagonal_kink);
    CHECK(sup_distance(apply_kernel(tri, y), sin_pi(g) * (1.0 / (pi * pi))) <= 1e-8);

    CHECK_THROWS_AS(apply_kernel(k, sin_pi(Grid(100))), UsageError);
}

TEST_CASE("apply_kernel is linear") {
    const Grid g(60);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    auto random_fn = [&] {
        Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
        for (auto& e : v) e = z(rng);
        return GridFunction(g, v);
    };
    const BivariateKernel smooth = BivariateKernel::smooth(g, [](double x, double t) { return std::cos(x - 2 * t); });
    const BivariateKernel kink = BivariateKernel::diagonal_kink(
        g, [](double x, double t) { return x - t; }, [](double x, double t) { return t - x; });
    for (const auto* k : {&smooth, &kink}) {
        for (int trial = 0; trial < 10; ++trial) {
            const double a = z(rng), b = z(rng);
            const GridFunction y1 = random_fn(), y2 = random_fn();
            const GridFunction lhs = apply_kernel(*k, a * y1 + b * y2);
            const GridFunction rhs = a * apply_kernel(*k, y1) + b * apply_kernel(*k, y2);
            CHECK(sup_distance(lhs, rhs) <= 1e-12);
        }
    }
}

TEST_CASE("branch-split quadrature is exact for piecewise polynomials") {
    // int_0^1 |x - t| t^2 dt
    auto exact = [](double x) {
        return std::pow(x, 4) / 12.0 + (1.0 - std::pow(x, 4)) / 4.0 - x * (1.0 - std::pow(x, 3)) / 3.0;
    };
    for (int n : {4, 8, 200}) {
        const Grid g(n);
        const BivariateKernel k = BivariateKernel::diagonal_kink(
            g, [](double x, double t) { return x - t; }, [](double x, double t) { return t - x; });
        CHECK(k.values()(1, 0) == doctest::Approx(g.x(1)));
        const GridFunction y = apply_kernel(k, GridFunction::sample(g, [](double t) { return t * t; }));
        CHECK(sup_distance(y, GridFunction::sample(g, exact)) <= 1e-13);
    }
}

TEST_CASE("from_operator and from_values round trip") {
    const Grid g(10);
    const BivariateKernel k = BivariateKernel::smooth(g, [](double x, double t) { return 1.0 + x * t; });
    const BivariateKernel back = BivariateKernel::from_operator(g, k.op());
    CHECK((back.values() - k.values()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(k.sup_abs() == doctest::Approx(2.0));
    CHECK(k.min() == doctest::Approx(1.0));
}

TEST_CASE("fourth difference") {
    SUBCASE("exact on polynomials of degree <= 5 (16 panels)") {
        const Grid g(16);
        const InteriorValues q =
            fd_fourth_derivative(GridFunction::sample(g, [](double x) { return 3 * x * x - x + 2; }));
        CHECK(q.first == 2);
        CHECK(q.last == 14);
        CHECK(q.sup_abs() <= 1e-8);
        const InteriorValues p5 = fd_fourth_derivative(
            GridFunction::sample(g, [](double x) { return std::pow(x, 5) - 2 * std::pow(x, 4) + x; }));
        for (std::size_t j = p5.first; j <= p5.last; ++j) {
            CHECK(std::abs(p5.values[j] - (120 * g.x(j) - 48)) <= 1e-8);
        }
    }
    SUBCASE("n = 200 within the rounding budget") {
        const Grid g(200);
        const double budget = 64 * std::numeric_limits<double>::epsilon() / std::pow(g.h(), 4);
        const InteriorValues q = fd_fourth_derivative(GridFunction::sample(g, [](double x) { return x * x; }));
        CHECK(q.sup_abs() <= budget);
        const InteriorValues x4 =
            fd_fourth_derivative(GridFunction::sample(g, [](double x) { return std::pow(x, 4); }));
        for (std::size_t j = x4.first; j <= x4.last; ++j) {
            CHECK(std::abs(x4.values[j] - 24.0) <= budget);
        }
        CHECK(x4.excluded(0));
        CHECK(x4.excluded(1));
        CHECK(!x4.excluded(2));
        CHECK(x4.excluded(199));
        CHECK(x4.excluded(200));
    }
    SUBCASE("sine, relative error below 1e-3") {
        const Grid g(200);
        const InteriorValues d = fd_fourth_derivative(sin_pi(g));
        double worst = 0.0;
        for (std::size_t j = d.first; j <= d.last; ++j) {
            worst = std::max(worst, std::abs(d.values[j] - std::pow(pi, 4) * std::sin(pi * g.x(j))));
        }
        CHECK(worst / std::pow(pi, 4) <= 1e-3);
    }
    CHECK_THROWS_AS(fd_fourth_derivative(GridFunction::zero(Grid(4))), UsageError);
    CHECK_NOTHROW(fd_fourth_derivative(GridFunction::zero(Grid(8))));
}

TEST_CASE("second differences") {
    const Grid g(100);
    const GridFunction y = GridFunction::sample(g, [](double x) { return x * x * x; });
    const InteriorValues d2 = fd_second_derivative(y);
    CHECK(d2.first == 1);
    CHECK(d2.last == 99);
    CHECK(d2.values[50] == doctest::Approx(3.0).epsilon(1e-9));
    // one-sided three-point estimate at the ends is O(h)
    CHECK(std::abs(one_sided_second_difference(y, End::left) - 0.0) <= 6 * g.h() + 1e-12);
    CHECK(std::abs(one_sided_second_difference(y, End::right) - 6.0) <= 6 * g.h() + 1e-9);
}

TEST_CASE("norms") {
    const Grid g(200);
    CHECK(sup_norm(GridFunction::zero(g)) == 0.0);
    CHECK(sup_norm(sin_pi(g)) == 1.0);
    CHECK(sup_distance(sin_pi(g), sin_pi(g)) == 0.0);
    CHECK(sup_norm(sin_pi(g).reflected() - sin_pi(g)) <= 1e-15);
    CHECK_THROWS_AS(sup_distance(sin_pi(g), sin_pi(Grid(100))), UsageError);
}
