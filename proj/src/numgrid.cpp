#include "beamide/numgrid.hpp"

#include "beamide/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace beamide {

namespace {

Eigen::VectorXd simpson_weights(int n) {
    const double h = 1.0 / n;
    Eigen::VectorXd w(n + 1);
    for (int j = 0; j <= n; ++j) {
        if (j == 0 || j == n) {
            w[j] = h / 3.0;
        } else {
            w[j] = (j % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
        }
    }
    return w;
}

// Weights c_k with int_0^1 p(s) ds = sum_k c_k p(o + k) for every polynomial p
// of degree < size, where the nodes o, o+1, ... are in units of h relative to
// the panel's left end. Four Gauss-Legendre points integrate the degree-5
// Lagrange basis exactly.
std::vector<double> panel_coefficients(int offset, int size) {
    static constexpr std::array<double, 4> gx = {-0.8611363115940526, -0.3399810435848563,
                                                 0.3399810435848563, 0.8611363115940526};
    static constexpr std::array<double, 4> gw = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
    std::vector<double> c(static_cast<std::size_t>(size), 0.0);
    for (int k = 0; k < size; ++k) {
        double acc = 0.0;
        for (std::size_t q = 0; q < gx.size(); ++q) {
            const double t = 0.5 * (gx[q] + 1.0);
            double basis = 1.0;
            for (int l = 0; l < size; ++l) {
                if (l != k) {
                    basis *= (t - (offset + l)) / static_cast<double>(k - l);
                }
            }
            acc += 0.5 * gw[q] * basis;
        }
        c[static_cast<std::size_t>(k)] = acc;
    }
    return c;
}

}  // namespace

// -- Grid -------------------------------------------------------------------

Grid::Grid(int n_panels) {
    if (n_panels < 4 || n_panels % 2 != 0) {
        throw ConfigError("grid needs an even number of panels >= 4, got " + std::to_string(n_panels));
    }
    Eigen::VectorXd nodes(n_panels + 1);
    for (int j = 0; j <= n_panels; ++j) {
        nodes[j] = static_cast<double>(j) / n_panels;
    }
    data_ = std::make_shared<const Data>(Data{n_panels, std::move(nodes), simpson_weights(n_panels)});
}

Grid make_grid(int n_panels) { return Grid(n_panels); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) {
        throw UsageError(std::string(what) + ": grid mismatch (" + std::to_string(a.n_panels()) + " vs " +
                         std::to_string(b.n_panels()) + " panels)");
    }
}

// -- GridFunction -------------------------------------------------------------

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
        throw UsageError("grid function has " + std::to_string(values_.size()) + " values for " +
                         std::to_string(grid_.size()) + " nodes");
    }
    for (Eigen::Index j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j])) {
            throw UsageError("grid function value at node " + std::to_string(j) + " is not finite");
        }
    }
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        v[static_cast<Eigen::Index>(j)] = f(grid.x(j));
    }
    return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::zero(const Grid& grid) {
    return GridFunction(grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())));
}

GridFunction GridFunction::reflected() const { return GridFunction(grid_, values_.reverse()); }

GridFunction GridFunction::operator+(const GridFunction& other) const {
    require_same_grid(grid_, other.grid_, "operator+");
    return GridFunction(grid_, values_ + other.values_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
    require_same_grid(grid_, other.grid_, "operator-");
    return GridFunction(grid_, values_ - other.values_);
}

GridFunction GridFunction::operator*(double a) const { return GridFunction(grid_, values_ * a); }

// -- BivariateKernel ----------------------------------------------------------

BivariateKernel::BivariateKernel(Grid grid, Eigen::MatrixXd values, Eigen::MatrixXd op, Structure s)
    : grid_(std::move(grid)), values_(std::move(values)), op_(std::move(op)), structure_(s) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (values_.rows() != n || values_.cols() != n || op_.rows() != n || op_.cols() != n) {
        throw UsageError("kernel tabulation does not match the grid");
    }
    if (!values_.allFinite() || !op_.allFinite()) {
        throw UsageError("kernel tabulation contains non-finite entries");
    }
}

BivariateKernel BivariateKernel::smooth(const Grid& grid, const Function& k) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd values(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            values(i, j) = k(grid.nodes()[i], grid.nodes()[j]);
        }
    }
    return from_values(grid, std::move(values));
}

BivariateKernel BivariateKernel::from_values(const Grid& grid, Eigen::MatrixXd values) {
    Eigen::MatrixXd op = values * grid.weights().asDiagonal();
    return BivariateKernel(grid, std::move(values), std::move(op), Structure::smooth);
}

BivariateKernel BivariateKernel::from_operator(const Grid& grid, Eigen::MatrixXd op) {
    Eigen::MatrixXd values = op * grid.weights().cwiseInverse().asDiagonal();
    return BivariateKernel(grid, std::move(values), std::move(op), Structure::smooth);
}

BivariateKernel BivariateKernel::diagonal_kink(const Grid& grid, const Function& lower, const Function& upper) {
    const int n = grid.n_panels();
    const auto size = static_cast<Eigen::Index>(grid.size());
    const double h = grid.h();
    const int stencil = std::min(6, n + 1);

    // The stencil is centred on the panel and shifted inwards at the grid ends,
    // so the offset of its first node relative to the panel lies in
    // [2 - stencil, 0]; coefficients depend on that offset only.
    auto start_of = [&](int panel) { return std::clamp(panel - (stencil - 1) / 2, 0, n + 1 - stencil); };
    std::vector<std::vector<double>> coeffs(static_cast<std::size_t>(stencil));
    for (int offset = 2 - stencil; offset <= 0; ++offset) {
        coeffs[static_cast<std::size_t>(-offset)] = panel_coefficients(offset, stencil);
    }

    Eigen::MatrixXd values(size, size);
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd lo(size);
    Eigen::VectorXd up(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double x = grid.nodes()[i];
        for (Eigen::Index j = 0; j < size; ++j) {
            const double t = grid.nodes()[j];
            lo[j] = lower(x, t);
            up[j] = upper(x, t);
            values(i, j) = j <= i ? lo[j] : up[j];
        }
        for (int panel = 0; panel < n; ++panel) {
            const int start = start_of(panel);
            const auto& c = coeffs[static_cast<std::size_t>(panel - start)];
            const Eigen::VectorXd& branch = panel < i ? lo : up;
            for (int k = 0; k < stencil; ++k) {
                op(i, start + k) += h * c[static_cast<std::size_t>(k)] * branch[start + k];
            }
        }
    }
    return BivariateKernel(grid, std::move(values), std::move(op), Structure::diagonal_kink);
}

// -- quadrature, norms, differences ------------------------------------------

double integrate(const GridFunction& f) { return f.grid().weights().dot(f.values()); }

GridFunction apply_kernel(const BivariateKernel& k, const GridFunction& y) {
    require_same_grid(k.grid(), y.grid(), "apply_kernel");
    return GridFunction(y.grid(), k.op() * y.values());
}

double InteriorValues::sup_abs() const {
    double s = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
        s = std::max(s, std::abs(values[j]));
    }
    return s;
}

InteriorValues fd_fourth_derivative(const GridFunction& y) {
    const std::size_t n = y.size() - 1;
    if (y.size() < 9) {
        throw UsageError("fourth difference needs at least 9 nodes, got " + std::to_string(y.size()));
    }
    const double h = y.grid().h();
    const double scale = 1.0 / (h * h * h * h);
    const Eigen::VectorXd& v = y.values();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(v.size());
    for (Eigen::Index i = 2; i <= static_cast<Eigen::Index>(n) - 2; ++i) {
        d[i] = (v[i - 2] - 4.0 * v[i - 1] + 6.0 * v[i] - 4.0 * v[i + 1] + v[i + 2]) * scale;
    }
    return InteriorValues{GridFunction(y.grid(), std::move(d)), 2, n - 2};
}

InteriorValues fd_second_derivative(const GridFunction& y) {
    const std::size_t n = y.size() - 1;
    const double h = y.grid().h();
    const Eigen::VectorXd& v = y.values();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(v.size());
    for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(n) - 1; ++i) {
        d[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
    }
    return InteriorValues{GridFunction(y.grid(), std::move(d)), 1, n - 1};
}

double one_sided_second_difference(const GridFunction& y, End end) {
    const double h = y.grid().h();
    const Eigen::VectorXd& v = y.values();
    const Eigen::Index n = v.size() - 1;
    if (end == End::left) {
        return (v[0] - 2.0 * v[1] + v[2]) / (h * h);
    }
    return (v[n] - 2.0 * v[n - 1] + v[n - 2]) / (h * h);
}

double sup_norm(const GridFunction& y) { return y.values().cwiseAbs().maxCoeff(); }

double sup_distance(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "sup_distance");
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace beamide
