#pragma once

// Problem definitions: expression-based specs, the built-in examples, and the
// reduction of a sixth-order problem u^(6) = f6(x, u'', u) to the
// fourth-order nonlocal form via y = u''.

#include "beamide/expression.hpp"
#include "beamide/monotone.hpp"
#include "beamide/numgrid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace beamide {

enum class Provenance { published_example, implementer_constructed, user };

const char* to_string(Provenance p) noexcept;

/// k(x,t) = t(1-x) for t <= x and x(1-t) for t >= x: the Green's function of
/// -u'' with u(0) = u(1) = 0.
BivariateKernel triangular_kernel(const Grid& grid);

/// Kernel given either as an expression over (x, t) or by the name "triangular".
struct KernelSpec {
    std::string text;
    std::optional<Expression> expr;  ///< empty for "triangular"

    static KernelSpec parse(const std::string& text);
    bool triangular() const noexcept { return !expr; }
    BivariateKernel tabulate(const Grid& grid) const;
};

/// Sixth-order problem u^(6) = f6(x, u'', u) with
/// u = u'' = u'''' = 0 at both ends.
struct SixthOrderSpec {
    Expression f6;  ///< over (x, p, q), p = u'', q = u
    double M = 0.0;
    double N = 0.0;
};

/// A published claim recorded next to the computed value it concerns.
struct StatedClaim {
    double g_max = 0.0;    ///< stated max_x int G(x,s) ds
    double N_bound = 0.0;  ///< stated admissible bound on N
};

struct ProblemSpec {
    std::string name;
    Expression f;  ///< over (x, u, v)
    KernelSpec k;
    double M = 0.0;
    double N = 0.0;
    Expression alpha;  ///< over x
    Expression beta;   ///< over x
    int n_panels = 200;
    double tol = 1e-8;
    int max_iter = 200;
    Provenance provenance = Provenance::user;
    std::optional<SixthOrderSpec> sixth_order{};
    std::optional<StatedClaim> claim{};
};

/// Parses the texts; ParseError propagates. f is over (x,u,v), k over (x,t)
/// (or "triangular"), alpha and beta over x.
ProblemSpec make_problem_spec(std::string name, const std::string& f, const std::string& k, double M, double N,
                              const std::string& alpha, const std::string& beta);

NonlinearIDE::Function as_function(const Expression& f);

/// Tabulates the kernel and validates (M, N, k) as a NonlinearIDE.
NonlinearIDE instantiate(const ProblemSpec& spec, const Grid& grid);
SectorPair sector_of(const ProblemSpec& spec, const Grid& grid);

struct BuiltinInfo {
    std::string name;
    Provenance provenance;
    std::string summary;
};

std::vector<BuiltinInfo> builtin_list();

/// Throws ConfigError for an unknown name.
ProblemSpec builtin_spec(const std::string& name);

struct BuiltinProblem {
    ProblemSpec spec;
    NonlinearIDE problem;
    SectorPair sector;
};

BuiltinProblem builtin(const std::string& name, const Grid& grid);

/// f(x, u, v) = f6(x, u, -v), since u = -int k y for the triangular kernel.
Expression reduced_rhs(const SixthOrderSpec& spec);
NonlinearIDE reduce_sixth_order(const SixthOrderSpec& spec, const Grid& grid);

/// u = -int k(x,t) y(t) dt with the triangular kernel; u(0) = u(1) = 0 exactly.
GridFunction reconstruct_u(const GridFunction& y, const Grid& grid);

}  // namespace beamide
