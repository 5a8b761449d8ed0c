#pragma once

#include "fts/mbb.hpp"

namespace fts {

/// Configuration of the K-sample equality test.
struct TestConfig {
    /// Per-population block lengths. Empty: the n^0.3 rule fills every entry.
    /// One entry with K > 1 populations broadcasts that value.
    std::vector<int> block_sizes;
    int replicates = 1000;
    double alpha = 0.05;
    RngSeed seed{};
    /// Per-population substream identifiers for the bootstrap draws. Empty
    /// means 0..K-1. Permuting these together with the populations reproduces
    /// a run with the population order swapped.
    std::vector<std::uint64_t> population_streams;
};

/// Everything the test produces. p_value uses the add-one Monte-Carlo
/// convention (1 + #{T* >= T}) / (B + 1); critical_value is the order
/// statistic of the bootstrap sample at rank ceil((1-alpha)(B+1)); the
/// rejection decision is t_observed > critical_value.
struct TestReport {
    double t_observed = 0.0;
    std::vector<double> t_bootstrap;
    double p_value = 1.0;
    double critical_value = 0.0;
    bool reject = false;

    std::vector<int> sample_sizes;
    int total_observations = 0;

    // configuration echo
    std::vector<int> block_sizes;
    int replicates = 0;
    double alpha = 0.0;
    RngSeed seed{};

    friend bool operator==(const TestReport&, const TestReport&) = default;
};

/// Observed statistic plus its bootstrap replicates, before any level is
/// chosen. One bootstrap sample serves every significance level.
struct BootstrapRun {
    double t_observed = 0.0;
    std::vector<double> t_bootstrap;
    std::vector<int> sample_sizes;
    std::vector<int> block_sizes;
};

/// Element average over all populations: (1/M) sum_i sum_t element_{i,t},
/// M = sum of sequence lengths. Requires K >= 2, one grid, equal lags.
KernelOperator pooled_mean(std::span<const TensorSequence> populations);

/// The b window means of length n_blocks = n - b + 1: entry xi (0-based) is
/// the average of elements xi, xi+1, ..., xi+n_blocks-1. Window xi is the
/// conditional expectation of a resampled element at within-block offset xi.
std::vector<KernelOperator> rolling_block_means(const TensorSequence& seq, int block_len);

/// Deterministic core of the null-enforcing resample for one population:
/// concatenates the blocks at the given starts, truncates to the population
/// length, and recentres every element as pooled + drawn - window_mean(offset
/// of its position). Averaging the output over all possible start tuples
/// gives exactly the pooled operator at every position.
TensorSequence null_pseudo_population(const TensorSequence& population, const KernelOperator& pooled,
                                      int block_len, std::span<const int> starts);

/// Null-enforcing bootstrap pseudo sample: for each population, blocks of
/// centered tensor elements are drawn with replacement and every pseudo
/// element is recentred as pooled + drawn - window_mean(offset), which forces
/// the conditional expectation of every pseudo element to the pooled mean.
/// Population i draws from rng.child(stream_id_i).
std::vector<TensorSequence> null_pseudo_sample(std::span<const TensorSequence> populations,
                                               const TestConfig& config, RngSeed rng);

/// Two-sample statistic (n1 n2 / M) * ||mean_1 - mean_2||^2_HS over the
/// population element means. Symmetric in its arguments.
double statistic_tm(const TensorSequence& pop1, const TensorSequence& pop2);

/// K-sample aggregate: sum over pairs i < j of (n_i n_j / M) times the
/// squared HS distance of the element means. Coincides with statistic_tm for
/// K = 2; for K > 2 it is a plumbing aggregate without a distribution theory.
double statistic_tm_multi(std::span<const TensorSequence> populations);

/// Smallest integer >= n^0.3, clamped to [1, n]. Integer arithmetic decides
/// ties exactly (b^10 vs n^3), so perfect powers are never off by one.
int default_block_size(int n);

/// Add-one Monte-Carlo p-value (1 + #{t_boot >= t_obs}) / (B + 1).
double bootstrap_p_value(double t_observed, std::span<const double> t_bootstrap);

/// Upper-alpha empirical critical value: ascending order statistic at rank
/// ceil((1-alpha)(B+1)), clamped to the sample. With this convention
/// t_observed > critical_value if and only if the add-one p-value is <= alpha
/// (up to ties in the bootstrap sample).
double bootstrap_critical_value(std::span<const double> t_bootstrap, double alpha);

/// Observed statistic and B bootstrap replicates for K >= 2 series, using
/// lag-zero tensor sequences. Replicate r uses config.seed.child(r), so
/// results are identical for any thread count.
BootstrapRun bootstrap_statistics(std::span<const FunctionalSeries> populations,
                                  const TestConfig& config);

/// Full test: bootstrap_statistics plus the p-value, critical value and
/// rejection decision at config.alpha.
TestReport run_test(std::span<const FunctionalSeries> populations, const TestConfig& config);

}  // namespace fts
