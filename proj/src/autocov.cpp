#include "fts/autocov.hpp"

#include <string>

namespace fts {

TensorSequence::TensorSequence(GridPtr grid, int lag, Eigen::MatrixXd columns)
    : grid_(std::move(grid)), lag_(lag), columns_(std::move(columns)) {
    if (!grid_) throw std::invalid_argument("TensorSequence: null grid");
    if (lag_ < 0) throw std::invalid_argument("TensorSequence: negative lag");
    const Eigen::Index L = grid_->size();
    if (columns_.rows() != L * L) throw std::invalid_argument("TensorSequence: column height does not match grid");
    if (columns_.cols() < 1) throw std::invalid_argument("TensorSequence: empty sequence");
    if (!columns_.allFinite()) throw std::invalid_argument("TensorSequence: non-finite entry");
}

TensorSequence::TensorSequence(GridPtr grid, int lag, const std::vector<KernelOperator>& elements)
    : grid_(std::move(grid)), lag_(lag) {
    if (!grid_) throw std::invalid_argument("TensorSequence: null grid");
    if (lag_ < 0) throw std::invalid_argument("TensorSequence: negative lag");
    if (elements.empty()) throw std::invalid_argument("TensorSequence: empty sequence");
    const Eigen::Index L = grid_->size();
    columns_.resize(L * L, static_cast<Eigen::Index>(elements.size()));
    for (std::size_t t = 0; t < elements.size(); ++t) {
        require_same_grid(grid_, elements[t].grid(), "TensorSequence");
        columns_.col(static_cast<Eigen::Index>(t)) =
            Eigen::Map<const Eigen::VectorXd>(elements[t].kernel().data(), L * L);
    }
}

KernelOperator TensorSequence::element(int t) const {
    if (t < 0 || t >= length()) throw std::invalid_argument("TensorSequence::element: index out of range");
    const Eigen::Index L = grid_->size();
    return KernelOperator(grid_, Eigen::Map<const Eigen::MatrixXd>(columns_.col(t).data(), L, L));
}

Curve sample_mean_curve(const FunctionalSeries& s) {
    return Curve(s.grid(), s.data().colwise().mean().transpose());
}

TensorSequence tensor_sequence(const FunctionalSeries& s, int h) {
    const int n = s.length();
    if (h < 0 || h >= n) throw std::invalid_argument("tensor_sequence: invalid lag " + std::to_string(h) + " for series of length " + std::to_string(n));
    const Eigen::Index L = s.grid()->size();
    const Eigen::RowVectorXd mean = s.data().colwise().mean();
    Eigen::MatrixXd centered = s.data().rowwise() - mean;  // n x L

    Eigen::MatrixXd cols(L * L, n - h);
    for (int t = 0; t < n - h; ++t) {
        Eigen::Map<Eigen::MatrixXd> kernel(cols.col(t).data(), L, L);
        // kernel(i, j) = centered(t+h, i) * centered(t, j)
        kernel.noalias() = centered.row(t + h).transpose() * centered.row(t);
    }
    return TensorSequence(s.grid(), h, std::move(cols));
}

KernelOperator empirical_autocov(const FunctionalSeries& s, int h) {
    const int n = s.length();
    const Eigen::Index L = s.grid()->size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(L, L);
    if (h >= n || h <= -n) return KernelOperator(s.grid(), std::move(acc));

    const Eigen::RowVectorXd mean = s.data().colwise().mean();
    Eigen::MatrixXd centered = s.data().rowwise() - mean;
    if (h >= 0) {
        for (int t = 0; t < n - h; ++t) acc.noalias() += centered.row(t + h).transpose() * centered.row(t);
    } else {
        // Mirrored definition: sum over t of (X_{t-h} - mean) (x) (X_t - mean).
        for (int t = 0; t < n + h; ++t) acc.noalias() += centered.row(t).transpose() * centered.row(t - h);
    }
    acc /= static_cast<double>(n);
    return KernelOperator(s.grid(), std::move(acc));
}

KernelOperator squared_difference_kernel(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a.grid(), b.grid(), "squared_difference_kernel");
    return KernelOperator(a.grid(), (a.kernel() - b.kernel()).array().square().matrix());
}

}  // namespace fts
