#include "beamide/problems.hpp"

#include "beamide/errors.hpp"

#include <cmath>
#include <numbers>

namespace beamide {

namespace {

const std::vector<std::string>& vars_f() {
    static const std::vector<std::string> v = {"x", "u", "v"};
    return v;
}

const std::vector<std::string>& vars_k() {
    static const std::vector<std::string> v = {"x", "t"};
    return v;
}

const std::vector<std::string>& vars_x() {
    static const std::vector<std::string> v = {"x"};
    return v;
}

GridFunction sample_expr(const Expression& e, const Grid& grid) {
    return GridFunction::sample(grid, [&](double x) { return e(x); });
}

ProblemSpec example_41() {
    const double M = 2.0 / std::numbers::pi;
    ProblemSpec s = make_problem_spec("example-4.1", "(2 - u^2)*v + sin(pi*x)", "sin(pi*x)*t", M, 0.4, "0",
                                      "sin(pi*x)");
    s.provenance = Provenance::published_example;
    const double g = std::cosh(std::pow(M, 0.25)) / M;
    s.claim = StatedClaim{g, 0.446};
    return s;
}

ProblemSpec example_42() {
    SixthOrderSpec six{Expression::parse("-q/2 + sin(pi*x)", {"x", "p", "q"}), 2.0 / std::numbers::pi, 0.4};
    ProblemSpec s{"example-4.2",
                  reduced_rhs(six),
                  KernelSpec::parse("triangular"),
                  six.M,
                  six.N,
                  Expression::parse("0", vars_x()),
                  Expression::parse("sin(pi*x)", vars_x())};
    s.provenance = Provenance::implementer_constructed;
    s.sixth_order = std::move(six);
    return s;
}

}  // namespace

const char* to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::published_example: return "published example";
        case Provenance::implementer_constructed: return "implementer-constructed";
        default: return "user";
    }
}

BivariateKernel triangular_kernel(const Grid& grid) {
    return BivariateKernel::diagonal_kink(
        grid, [](double x, double t) { return t * (1.0 - x); }, [](double x, double t) { return x * (1.0 - t); });
}

KernelSpec KernelSpec::parse(const std::string& text) {
    if (text == "triangular") {
        return KernelSpec{text, std::nullopt};
    }
    return KernelSpec{text, Expression::parse(text, vars_k())};
}

BivariateKernel KernelSpec::tabulate(const Grid& grid) const {
    if (!expr) {
        return triangular_kernel(grid);
    }
    const Expression& e = *expr;
    return BivariateKernel::smooth(grid, [&](double x, double t) { return e(x, t); });
}

ProblemSpec make_problem_spec(std::string name, const std::string& f, const std::string& k, double M, double N,
                              const std::string& alpha, const std::string& beta) {
    return ProblemSpec{std::move(name),
                       Expression::parse(f, vars_f()),
                       KernelSpec::parse(k),
                       M,
                       N,
                       Expression::parse(alpha, vars_x()),
                       Expression::parse(beta, vars_x())};
}

NonlinearIDE::Function as_function(const Expression& f) {
    return [f](double x, double u, double v) { return f(x, u, v); };
}

NonlinearIDE instantiate(const ProblemSpec& spec, const Grid& grid) {
    return NonlinearIDE(as_function(spec.f), spec.k.tabulate(grid), spec.M, spec.N);
}

SectorPair sector_of(const ProblemSpec& spec, const Grid& grid) {
    return SectorPair(sample_expr(spec.alpha, grid), sample_expr(spec.beta, grid));
}

std::vector<BuiltinInfo> builtin_list() {
    return {
        {"example-4.1", Provenance::published_example,
         "y'''' = sin(pi x)[(2 - y^2) int t y dt + 1], M = 2/pi, N = 0.4, alpha = 0, beta = sin(pi x)"},
        {"example-4.2", Provenance::implementer_constructed,
         "u^(6) = -u/2 + sin(pi x) reduced by y = u'' (triangular kernel), M = 2/pi, N = 0.4, alpha = 0, "
         "beta = sin(pi x)"},
    };
}

ProblemSpec builtin_spec(const std::string& name) {
    if (name == "example-4.1") {
        return example_41();
    }
    if (name == "example-4.2") {
        return example_42();
    }
    throw ConfigError("unknown built-in problem '" + name + "' (try: example-4.1, example-4.2)");
}

BuiltinProblem builtin(const std::string& name, const Grid& grid) {
    ProblemSpec spec = builtin_spec(name);
    NonlinearIDE problem = instantiate(spec, grid);
    SectorPair sector = sector_of(spec, grid);
    return BuiltinProblem{std::move(spec), std::move(problem), std::move(sector)};
}

Expression reduced_rhs(const SixthOrderSpec& spec) { return spec.f6.with_variables(vars_f()).negating("v"); }

NonlinearIDE reduce_sixth_order(const SixthOrderSpec& spec, const Grid& grid) {
    return NonlinearIDE(as_function(reduced_rhs(spec)), triangular_kernel(grid), spec.M, spec.N);
}

GridFunction reconstruct_u(const GridFunction& y, const Grid& grid) {
    require_same_grid(grid, y.grid(), "reconstruct_u");
    Eigen::VectorXd u = -(triangular_kernel(grid).op() * y.values());
    // Both end rows of the operator vanish; store +0 rather than -0.
    u[0] = 0.0;
    u[u.size() - 1] = 0.0;
    return GridFunction(grid, std::move(u));
}

}  // namespace beamide
