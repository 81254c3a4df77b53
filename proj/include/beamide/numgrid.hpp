#pragma once

// Uniform grids on [0,1], composite Simpson quadrature, sampled functions and
// kernels, sup norms and finite-difference derivatives.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>

namespace beamide {

/// Uniform grid x_j = j/n on [0,1] carrying composite Simpson weights.
///
/// Copies share the node and weight storage. Two grids compare equal when they
/// have the same panel count, which fully determines a uniform grid on [0,1].
class Grid {
public:
    /// Throws ConfigError unless n_panels is even and at least 4.
    explicit Grid(int n_panels);

    int n_panels() const noexcept { return data_->n_panels; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(data_->n_panels) + 1; }
    double h() const noexcept { return 1.0 / data_->n_panels; }
    double x(std::size_t j) const { return data_->nodes[static_cast<Eigen::Index>(j)]; }

    const Eigen::VectorXd& nodes() const noexcept { return data_->nodes; }
    const Eigen::VectorXd& weights() const noexcept { return data_->weights; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_panels() == b.n_panels(); }

private:
    struct Data {
        int n_panels;
        Eigen::VectorXd nodes;
        Eigen::VectorXd weights;
    };
    std::shared_ptr<const Data> data_;
};

Grid make_grid(int n_panels);

/// Real function sampled at the nodes of a grid.
class GridFunction {
public:
    /// Throws UsageError on a size mismatch or a non-finite value.
    GridFunction(Grid grid, Eigen::VectorXd values);

    static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);
    static GridFunction zero(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }

    /// Values at 1 - x_j, i.e. the samples of x -> f(1 - x).
    GridFunction reflected() const;

    GridFunction operator+(const GridFunction& other) const;
    GridFunction operator-(const GridFunction& other) const;
    GridFunction operator*(double a) const;
    friend GridFunction operator*(double a, const GridFunction& f) { return f * a; }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

/// Kernel K(x,t) sampled on the node product of a grid.
///
/// Besides the tabulated values every kernel carries its quadrature operator:
/// the matrix that maps nodal samples y(t_j) to nodal approximations of
/// int_0^1 K(x_i,t) y(t) dt. For smooth kernels the operator is the tabulation
/// times the Simpson weights. Kernels whose derivatives jump across the
/// diagonal t = x are integrated row by row on [0,x_i] and [x_i,1] separately,
/// each side with its own smooth branch, so the quadrature error stays smooth
/// in x_i and survives finite differencing.
class BivariateKernel {
public:
    enum class Structure { smooth, diagonal_kink };

    using Function = std::function<double(double x, double t)>;

    static BivariateKernel smooth(const Grid& grid, const Function& k);

    /// `lower` is the branch valid for t <= x, `upper` the branch for t >= x.
    /// Both must extend analytically a few nodes across the diagonal; the
    /// panel rule reads up to three nodes past x_i on either side.
    static BivariateKernel diagonal_kink(const Grid& grid, const Function& lower, const Function& upper);

    /// Smooth kernel from a tabulation; the operator uses Simpson weights.
    static BivariateKernel from_values(const Grid& grid, Eigen::MatrixXd values);

    /// Kernel defined by its quadrature operator. The stored values are the
    /// operator divided column-wise by the Simpson weights, so that applying
    /// them with the shared rule reproduces the operator.
    static BivariateKernel from_operator(const Grid& grid, Eigen::MatrixXd op);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const Eigen::MatrixXd& op() const noexcept { return op_; }
    Structure structure() const noexcept { return structure_; }

    double sup_abs() const { return values_.cwiseAbs().maxCoeff(); }
    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }

private:
    BivariateKernel(Grid grid, Eigen::MatrixXd values, Eigen::MatrixXd op, Structure s);

    Grid grid_;
    Eigen::MatrixXd values_;
    Eigen::MatrixXd op_;
    Structure structure_;
};

/// Sum_j w_j f(x_j) with the composite Simpson weights.
double integrate(const GridFunction& f);

/// result(x_i) = int_0^1 K(x_i,t) y(t) dt through the kernel's operator.
GridFunction apply_kernel(const BivariateKernel& k, const GridFunction& y);

/// Values defined on nodes first..last only; the rest are zero and excluded.
struct InteriorValues {
    GridFunction values;
    std::size_t first;
    std::size_t last;

    bool excluded(std::size_t j) const noexcept { return j < first || j > last; }
    double sup_abs() const;
};

/// Central 5-point fourth difference on nodes 2..n-2. Needs at least 9 nodes.
InteriorValues fd_fourth_derivative(const GridFunction& y);

/// Central 3-point second difference on nodes 1..n-1.
InteriorValues fd_second_derivative(const GridFunction& y);

enum class End { left, right };

/// (y_0 - 2y_1 + y_2)/h^2 at the left end, mirrored at the right; O(h).
double one_sided_second_difference(const GridFunction& y, End end);

double sup_norm(const GridFunction& y);
double sup_distance(const GridFunction& a, const GridFunction& b);

/// Throws UsageError unless both objects live on equal grids.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace beamide
