#pragma once

#include "fts/fcore.hpp"

namespace fts {

/// Time-ordered sequence of centered tensor-product operators
/// (X_t - mean) (x) (X_{t+h} - mean), stored as one (L^2 x m) matrix whose
/// column t is the column-major flattening of element t's kernel. The flat
/// layout keeps block resampling and sequence averages allocation-free.
class TensorSequence {
public:
    /// Takes ownership of pre-flattened columns. lag >= 0; the notional
    /// source-series length is length() + lag.
    TensorSequence(GridPtr grid, int lag, Eigen::MatrixXd columns);

    TensorSequence(GridPtr grid, int lag, const std::vector<KernelOperator>& elements);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] int lag() const noexcept { return lag_; }
    [[nodiscard]] int length() const noexcept { return static_cast<int>(columns_.cols()); }

    /// Flattened elements; column t = vec(kernel of element t).
    [[nodiscard]] const Eigen::MatrixXd& columns() const noexcept { return columns_; }

    [[nodiscard]] KernelOperator element(int t) const;

private:
    GridPtr grid_;
    int lag_;
    Eigen::MatrixXd columns_;  // (L*L) x m
};

/// Pointwise average of all curves in the series.
Curve sample_mean_curve(const FunctionalSeries& s);

/// Sequence of n-h tensor products of curves centered at the full-sample
/// mean: element t is (X_{t} - mean) (x) (X_{t+h} - mean). Requires
/// 0 <= h < n; h >= n (or negative h) is an invalid lag.
TensorSequence tensor_sequence(const FunctionalSeries& s, int h);

/// Sample autocovariance operator at lag h. The divisor is the series length
/// n, not the number of summands n-|h|. Out-of-range lags (|h| >= n) return
/// the zero operator; negative lags use the mirrored sum, which equals the
/// transpose of the positive-lag kernel.
KernelOperator empirical_autocov(const FunctionalSeries& s, int h);

/// Entrywise (A - B)^2, the kernel of pointwise squared differences used for
/// diagnostic surface plots.
KernelOperator squared_difference_kernel(const KernelOperator& a, const KernelOperator& b);

}  // namespace fts
