#include "fts/mbb.hpp"

#include <cmath>
#include <string>

#include "fts/parallel.hpp"

namespace fts {

BlockPlan make_block_plan(int n_eff, int block_len) {
    if (n_eff < 1) throw std::invalid_argument("make_block_plan: empty sequence");
    if (block_len < 1 || block_len > n_eff)
        throw std::invalid_argument("make_block_plan: block length " + std::to_string(block_len) +
                                    " out of range for sequence of length " + std::to_string(n_eff));
    BlockPlan plan;
    plan.n_eff = n_eff;
    plan.block_len = block_len;
    plan.n_blocks = n_eff - block_len + 1;
    plan.k_draws = (n_eff + block_len - 1) / block_len;
    return plan;
}

std::vector<int> draw_block_starts(const BlockPlan& plan, Rng& rng) {
    std::vector<int> starts(static_cast<std::size_t>(plan.k_draws));
    for (auto& s : starts) s = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(plan.n_blocks)));
    return starts;
}

TensorSequence mbb_resample_from_starts(const TensorSequence& seq, int block_len,
                                        std::span<const int> starts) {
    const BlockPlan plan = make_block_plan(seq.length(), block_len);
    if (starts.size() != static_cast<std::size_t>(plan.k_draws))
        throw std::invalid_argument("mbb_resample_from_starts: expected " + std::to_string(plan.k_draws) + " starts");
    Eigen::MatrixXd out(seq.columns().rows(), plan.n_eff);
    for (int t = 0; t < plan.n_eff; ++t) {
        const int start = starts[static_cast<std::size_t>(t / block_len)];
        if (start < 0 || start >= plan.n_blocks) throw std::invalid_argument("mbb_resample_from_starts: start out of range");
        out.col(t) = seq.columns().col(start + t % block_len);
    }
    return TensorSequence(seq.grid(), seq.lag(), std::move(out));
}

TensorSequence mbb_resample(const TensorSequence& seq, int block_len, RngSeed rng) {
    const BlockPlan plan = make_block_plan(seq.length(), block_len);
    Rng engine(rng);
    const std::vector<int> starts = draw_block_starts(plan, engine);
    return mbb_resample_from_starts(seq, block_len, starts);
}

KernelOperator bootstrap_autocov(const TensorSequence& resampled, int n) {
    const Eigen::Index L = resampled.grid()->size();
    if (resampled.length() != n - resampled.lag())
        throw std::invalid_argument("bootstrap_autocov: sequence length does not match series length minus lag");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(L * L);
    for (int t = 0; t < resampled.length(); ++t) acc += resampled.columns().col(t);
    const Eigen::VectorXd scaled = acc / static_cast<double>(n);
    return KernelOperator(resampled.grid(), Eigen::Map<const Eigen::MatrixXd>(scaled.data(), L, L));
}

KernelOperator mbb_expectation(const TensorSequence& seq, int block_len, int n) {
    const Eigen::Index L = seq.grid()->size();
    if (seq.length() != n - seq.lag())
        throw std::invalid_argument("mbb_expectation: sequence length does not match series length minus lag");
    const BlockPlan plan = make_block_plan(seq.length(), block_len);

    // Sum over positions of the per-offset window means:
    //   E* = (1/(n*N)) * sum_xi count(xi) * sum_{q=0}^{N-1} element(q+xi),
    // where count(xi) is how many positions share within-block offset xi.
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(L * L);
    Eigen::VectorXd window = Eigen::VectorXd::Zero(L * L);
    for (int xi = 0; xi < plan.block_len; ++xi) {
        window.setZero();
        for (int q = 0; q < plan.n_blocks; ++q) window += seq.columns().col(q + xi);
        const double count = static_cast<double>((plan.n_eff - 1 - xi) / plan.block_len + 1);
        acc += count * window;
    }
    const Eigen::VectorXd scaled = acc / (static_cast<double>(n) * static_cast<double>(plan.n_blocks));
    return KernelOperator(seq.grid(), Eigen::Map<const Eigen::MatrixXd>(scaled.data(), L, L));
}

std::vector<double> mbb_clt_sample(const FunctionalSeries& s, int lag, int block_len,
                                   int replicates, RngSeed rng) {
    if (replicates < 1) throw std::invalid_argument("mbb_clt_sample: need at least one replicate");
    const TensorSequence seq = tensor_sequence(s, lag);
    const int n = s.length();
    const KernelOperator expectation = mbb_expectation(seq, block_len, n);
    const double root_n = std::sqrt(static_cast<double>(n));

    std::vector<double> values(static_cast<std::size_t>(replicates));
    parallel_for(replicates, [&](int r) {
        const TensorSequence resampled = mbb_resample(seq, block_len, rng.child(static_cast<std::uint64_t>(r)));
        const KernelOperator boot = bootstrap_autocov(resampled, n);
        const KernelOperator diff(seq.grid(), boot.kernel() - expectation.kernel());
        values[static_cast<std::size_t>(r)] = root_n * hs_norm(diff);
    });
    return values;
}

}  // namespace fts
