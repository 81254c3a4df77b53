#pragma once

// Seeded random problem families for property tests.

#include "beamide/linsolve.hpp"
#include "oracles.hpp"

#include <random>

namespace gen {

using namespace beamide;
using oracle::pi;

/// Admissible linear problem: trigonometric p, nonnegative separable k,
/// random boundary data, and N scaled so that d equals `target_d`.
inline LinearIDE random_linear(std::mt19937_64& rng, const Grid& grid, double target_d, bool allow_negative_N = true) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    const double M = 0.5 + 99.5 * pos(rng);
    const double a1 = u(rng), a2 = u(rng), a3 = u(rng), b = u(rng);
    const GridFunction p = GridFunction::sample(grid, [&](double x) {
        return 50.0 * (a1 * std::sin(pi * x) + a2 * std::sin(2 * pi * x) + a3 * std::cos(3 * pi * x) + b);
    });
    const double c1 = pos(rng), c2 = pos(rng), c3 = pos(rng);
    const BivariateKernel k = BivariateKernel::smooth(grid, [&](double x, double t) {
        return (1.0 + c1 * std::sin(pi * x)) * (c2 + c3 * t * t);
    });
    const double g_max = GreenOperator(GreenParams(M), grid).integral_max();
    double N = target_d / (k.sup_abs() * g_max);
    if (allow_negative_N && u(rng) < 0.0) {
        N = -N;
    }
    return LinearIDE{M, N, k, p, BoundaryData{u(rng), u(rng), u(rng), u(rng)}};
}

/// Case (i) of the maximum principle: p >= 0, A, B >= 0, C, D <= 0,
/// N k >= 0, M < c1, contraction. `negate` produces case (ii).
inline LinearIDE random_principle_case(std::mt19937_64& rng, const Grid& grid, bool negate) {
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    const double M = 0.1 + 124.9 * pos(rng);
    const double a = pos(rng), b = pos(rng), c = pos(rng), e = pos(rng);
    const double s = negate ? -1.0 : 1.0;
    const GridFunction p = GridFunction::sample(grid, [&](double x) {
        return s * (a + 20.0 * b * std::sin(pi * x) + 5.0 * c * x * std::exp(-e * x) * (1.5 + std::cos(7 * x)));
    });
    const double c1 = pos(rng), c2 = pos(rng);
    const BivariateKernel k =
        BivariateKernel::smooth(grid, [&](double x, double t) { return c1 * x * t + c2 * std::exp(-(x - t) * (x - t)); });
    const double g_max = GreenOperator(GreenParams(M), grid).integral_max();
    const double N = 0.9 * pos(rng) / (k.sup_abs() * g_max);
    // Sometimes sit exactly on the boundary of the sign pattern.
    auto pick = [&] { return pos(rng) < 0.2 ? 0.0 : pos(rng); };
    return LinearIDE{M, N, k, p, BoundaryData{s * pick(), s * pick(), -s * pick(), -s * pick()}};
}

}  // namespace gen
