#include "fts/fcore.hpp"

#include <cmath>
#include <string>

namespace fts {

Grid::Grid(int n_points) {
    if (n_points < 2) throw std::invalid_argument("Grid: need at least 2 points, got " + std::to_string(n_points));
    const int L = n_points;
    const double spacing = 1.0 / (L - 1);
    points_.resize(L);
    weights_.resize(L);
    for (int j = 0; j < L; ++j) {
        points_[j] = static_cast<double>(j) * spacing;
        weights_[j] = (j == 0 || j == L - 1) ? spacing / 2.0 : spacing;
    }
    kernel_weights_.resize(static_cast<Eigen::Index>(L) * L);
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < L; ++i) kernel_weights_[static_cast<Eigen::Index>(j) * L + i] = weights_[i] * weights_[j];
}

GridPtr make_grid(int n_points) { return std::make_shared<const Grid>(n_points); }

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept {
    // Grids are canonical per size, so size equality is value equality.
    return a.get() == b.get() || (a && b && a->size() == b->size());
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
    if (!same_grid(a, b)) throw GridMismatchError(std::string(where) + ": operands live on different grids");
}

Curve::Curve(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("Curve: null grid");
    if (values_.size() != grid_->size()) throw std::invalid_argument("Curve: value count does not match grid size");
    if (!values_.allFinite()) throw std::invalid_argument("Curve: non-finite value");
}

FunctionalSeries::FunctionalSeries(GridPtr grid, Eigen::MatrixXd rows_are_curves)
    : grid_(std::move(grid)), data_(std::move(rows_are_curves)) {
    if (!grid_) throw std::invalid_argument("FunctionalSeries: null grid");
    if (data_.rows() < 1) throw std::invalid_argument("FunctionalSeries: need at least one curve");
    if (data_.cols() != grid_->size()) throw std::invalid_argument("FunctionalSeries: column count does not match grid size");
    if (!data_.allFinite()) throw std::invalid_argument("FunctionalSeries: non-finite value");
}

FunctionalSeries::FunctionalSeries(GridPtr grid, const std::vector<Curve>& curves)
    : grid_(std::move(grid)) {
    if (!grid_) throw std::invalid_argument("FunctionalSeries: null grid");
    if (curves.empty()) throw std::invalid_argument("FunctionalSeries: need at least one curve");
    data_.resize(static_cast<Eigen::Index>(curves.size()), grid_->size());
    for (std::size_t t = 0; t < curves.size(); ++t) {
        require_same_grid(grid_, curves[t].grid(), "FunctionalSeries");
        data_.row(static_cast<Eigen::Index>(t)) = curves[t].values().transpose();
    }
}

Curve FunctionalSeries::curve(int t) const {
    if (t < 0 || t >= length()) throw std::invalid_argument("FunctionalSeries::curve: index out of range");
    return Curve(grid_, data_.row(t).transpose());
}

KernelOperator::KernelOperator(GridPtr grid, Eigen::MatrixXd kernel)
    : grid_(std::move(grid)), kernel_(std::move(kernel)) {
    if (!grid_) throw std::invalid_argument("KernelOperator: null grid");
    if (kernel_.rows() != grid_->size() || kernel_.cols() != grid_->size())
        throw std::invalid_argument("KernelOperator: kernel shape does not match grid");
    if (!kernel_.allFinite()) throw std::invalid_argument("KernelOperator: non-finite entry");
}

double inner_product(const Curve& f, const Curve& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    return f.grid()->weights().dot(f.values().cwiseProduct(g.values()));
}

double l2_norm(const Curve& f) { return std::sqrt(inner_product(f, f)); }

KernelOperator tensor_product(const Curve& f, const Curve& g) {
    require_same_grid(f.grid(), g.grid(), "tensor_product");
    return KernelOperator(f.grid(), g.values() * f.values().transpose());
}

double hs_inner(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a.grid(), b.grid(), "hs_inner");
    const Eigen::VectorXd& w = a.grid()->weights();
    return w.dot((a.kernel().cwiseProduct(b.kernel())) * w);
}

double hs_norm(const KernelOperator& a) { return std::sqrt(hs_inner(a, a)); }

KernelOperator kernel_linear_combine(std::span<const double> coeffs,
                                     std::span<const KernelOperator> ops) {
    if (coeffs.empty() || ops.empty()) throw std::invalid_argument("kernel_linear_combine: empty input");
    if (coeffs.size() != ops.size()) throw std::invalid_argument("kernel_linear_combine: coefficient/operator count mismatch");
    const GridPtr& grid = ops.front().grid();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grid->size(), grid->size());
    for (std::size_t k = 0; k < ops.size(); ++k) {
        require_same_grid(grid, ops[k].grid(), "kernel_linear_combine");
        acc.noalias() += coeffs[k] * ops[k].kernel();
    }
    return KernelOperator(grid, std::move(acc));
}

}  // namespace fts
