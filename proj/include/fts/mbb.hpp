#pragma once

#include "fts/autocov.hpp"
#include "fts/rng.hpp"

namespace fts {

/// Geometry of a moving-block resampling scheme over a sequence of length
/// n_eff: all n_blocks = n_eff - b + 1 overlapping blocks of length b are
/// candidates, and k_draws = ceil(n_eff / b) of them are drawn with
/// replacement (the concatenation is truncated back to n_eff when b does not
/// divide n_eff).
struct BlockPlan {
    int n_eff;
    int block_len;
    int n_blocks;
    int k_draws;
};

/// Validates 1 <= b <= n_eff and fills in the derived counts.
BlockPlan make_block_plan(int n_eff, int block_len);

/// k_draws i.i.d. block start indices, uniform on [0, n_blocks).
std::vector<int> draw_block_starts(const BlockPlan& plan, Rng& rng);

/// Deterministic resample: concatenates the blocks starting at the given
/// 0-based indices and truncates to the input length. Elements are copied
/// unchanged; no arithmetic is performed on values.
TensorSequence mbb_resample_from_starts(const TensorSequence& seq, int block_len,
                                        std::span<const int> starts);

/// Moving block bootstrap resample of a tensor sequence. All draws come from
/// the given seed, so the output is reproducible bit-for-bit.
TensorSequence mbb_resample(const TensorSequence& seq, int block_len, RngSeed rng);

/// Bootstrap autocovariance estimator: the element average of a resampled
/// sequence, divided by the original series length n (matching the divisor of
/// the sample autocovariance, not the number of summands).
KernelOperator bootstrap_autocov(const TensorSequence& resampled, int n);

/// Conditional expectation of bootstrap_autocov over all block draws,
/// computed exactly for every (n_eff, b): each output position t has a fixed
/// within-block offset, so its expectation is the mean of the elements over
/// the n_blocks valid starts at that offset. When b divides n_eff this
/// reduces to the closed-form boundary-tapered sum.
KernelOperator mbb_expectation(const TensorSequence& seq, int block_len, int n);

/// B independent replicates of sqrt(n) * ||C*_h - E*(C*_h)||_HS for the
/// lag-h tensor sequence of the series; the empirical law of these values
/// approximates the sampling law of sqrt(n) * ||C_h_hat - C_h||_HS.
/// Replicate r draws from rng.child(r).
std::vector<double> mbb_clt_sample(const FunctionalSeries& s, int lag, int block_len,
                                   int replicates, RngSeed rng);

}  // namespace fts
