#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace fts {

/// Thrown when two objects that must share a discretization grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Equidistant evaluation grid on [0, 1] with trapezoidal quadrature weights.
/// points[j] = j/(L-1); interior weights are 1/(L-1), endpoint weights
/// 1/(2(L-1)), so the weights sum to one. Grids are immutable and shared by
/// every object discretized on them; two grids with the same number of points
/// are interchangeable because the construction is canonical.
class Grid {
public:
    explicit Grid(int n_points);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
    [[nodiscard]] const Eigen::VectorXd& points() const noexcept { return points_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }

    /// vec(w w^T): weight of each kernel entry in Hilbert-Schmidt sums,
    /// flattened column-major to length L^2.
    [[nodiscard]] const Eigen::VectorXd& kernel_weights() const noexcept { return kernel_weights_; }

private:
    Eigen::VectorXd points_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd kernel_weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the L-point grid. Throws std::invalid_argument for L < 2.
GridPtr make_grid(int n_points);

[[nodiscard]] bool same_grid(const GridPtr& a, const GridPtr& b) noexcept;
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

/// One functional observation: values of a square-integrable function at the
/// grid points. Immutable after construction; all values must be finite.
class Curve {
public:
    Curve(GridPtr grid, Eigen::VectorXd values);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

/// A time-ordered sample of curves on one grid. Row t of data() holds the
/// values of observation t (0-based in storage, time order preserved).
class FunctionalSeries {
public:
    FunctionalSeries(GridPtr grid, Eigen::MatrixXd rows_are_curves);
    FunctionalSeries(GridPtr grid, const std::vector<Curve>& curves);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] int length() const noexcept { return static_cast<int>(data_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& data() const noexcept { return data_; }
    [[nodiscard]] Curve curve(int t) const;

private:
    GridPtr grid_;
    Eigen::MatrixXd data_;  // n x L
};

/// A Hilbert-Schmidt integral operator represented by its kernel values on
/// grid x grid: kernel(i, j) = k(points[i], points[j]). Not symmetric in
/// general; lag-zero covariance kernels are.
class KernelOperator {
public:
    KernelOperator(GridPtr grid, Eigen::MatrixXd kernel);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(kernel_.rows()); }

private:
    GridPtr grid_;
    Eigen::MatrixXd kernel_;
};

/// Quadrature inner product sum_j w_j f_j g_j. Symmetric and bilinear.
double inner_product(const Curve& f, const Curve& g);

/// sqrt(<f, f>).
double l2_norm(const Curve& f);

/// Rank-one operator f (x) g mapping x to <f, x> g. Its kernel is
/// kernel(i, j) = g_i * f_j, so the quadrature action reproduces <f, x> g.
KernelOperator tensor_product(const Curve& f, const Curve& g);

/// Hilbert-Schmidt inner product sum_ij w_i w_j A_ij B_ij.
double hs_inner(const KernelOperator& a, const KernelOperator& b);

/// sqrt(hs_inner(A, A)).
double hs_norm(const KernelOperator& a);

/// Entrywise sum_k coeffs[k] * ops[k]. Requires equal nonempty lengths and a
/// shared grid.
KernelOperator kernel_linear_combine(std::span<const double> coeffs,
                                     std::span<const KernelOperator> ops);

}  // namespace fts
