#include "fts/eqtest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fts/parallel.hpp"

namespace fts {

namespace {

void require_population_set(std::span<const TensorSequence> populations, const char* where) {
    if (populations.size() < 2) throw std::invalid_argument(std::string(where) + ": need at least 2 populations");
    for (std::size_t i = 1; i < populations.size(); ++i) {
        require_same_grid(populations[0].grid(), populations[i].grid(), where);
        if (populations[i].lag() != populations[0].lag())
            throw std::invalid_argument(std::string(where) + ": populations have different lags");
    }
}

// Window means per within-block offset; column xi = mean of elements
// xi .. xi + n_blocks - 1.
Eigen::MatrixXd offset_window_means(const Eigen::MatrixXd& columns, const BlockPlan& plan) {
    Eigen::MatrixXd means(columns.rows(), plan.block_len);
    Eigen::VectorXd window(columns.rows());
    for (int xi = 0; xi < plan.block_len; ++xi) {
        window.setZero();
        for (int q = 0; q < plan.n_blocks; ++q) window += columns.col(q + xi);
        means.col(xi) = window / static_cast<double>(plan.n_blocks);
    }
    return means;
}

// Per-population sums are taken first so that, for two populations, the
// pooled value is invariant under swapping them (addition commutes).
Eigen::VectorXd pooled_mean_vector(std::span<const TensorSequence> populations) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(populations[0].columns().rows());
    Eigen::VectorXd pop_sum(populations[0].columns().rows());
    int total = 0;
    for (const TensorSequence& pop : populations) {
        pop_sum.setZero();
        for (int t = 0; t < pop.length(); ++t) pop_sum += pop.columns().col(t);
        acc += pop_sum;
        total += pop.length();
    }
    return acc / static_cast<double>(total);
}

// One population's pseudo sample: column t = pooled + drawn element - window
// mean of t's offset. Identical arithmetic backs the public pseudo sample,
// the deterministic from-starts variant and the bootstrap loop of run_test.
void materialize_pseudo_columns(const Eigen::MatrixXd& source, const Eigen::MatrixXd& window_means,
                                const Eigen::VectorXd& pooled, const BlockPlan& plan,
                                std::span<const int> starts, Eigen::MatrixXd& out) {
    if (starts.size() != static_cast<std::size_t>(plan.k_draws))
        throw std::invalid_argument("null pseudo sample: expected " + std::to_string(plan.k_draws) + " block starts");
    out.resize(source.rows(), plan.n_eff);
    for (int t = 0; t < plan.n_eff; ++t) {
        const int offset = t % plan.block_len;
        const int start = starts[static_cast<std::size_t>(t / plan.block_len)];
        if (start < 0 || start >= plan.n_blocks) throw std::invalid_argument("null pseudo sample: start out of range");
        out.col(t) = pooled + source.col(start + offset) - window_means.col(offset);
    }
}

double pair_statistic(const Eigen::VectorXd& mean_a, int n_a, const Eigen::VectorXd& mean_b, int n_b,
                      int total, const Eigen::VectorXd& kernel_weights) {
    const Eigen::VectorXd diff = mean_a - mean_b;
    const double hs_sq = kernel_weights.dot(diff.cwiseProduct(diff));
    return static_cast<double>(n_a) * static_cast<double>(n_b) / static_cast<double>(total) * hs_sq;
}

double multi_statistic_from_means(const std::vector<Eigen::VectorXd>& means, const std::vector<int>& sizes,
                                  const Eigen::VectorXd& kernel_weights) {
    int total = 0;
    for (int n : sizes) total += n;
    double stat = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = i + 1; j < means.size(); ++j)
            stat += pair_statistic(means[i], sizes[i], means[j], sizes[j], total, kernel_weights);
    return stat;
}

std::vector<int> resolve_block_sizes(const TestConfig& config, const std::vector<int>& series_lengths) {
    const std::size_t k = series_lengths.size();
    std::vector<int> sizes;
    if (config.block_sizes.empty()) {
        sizes.reserve(k);
        for (int n : series_lengths) sizes.push_back(default_block_size(n));
    } else if (config.block_sizes.size() == 1 && k > 1) {
        sizes.assign(k, config.block_sizes[0]);
    } else if (config.block_sizes.size() == k) {
        sizes = config.block_sizes;
    } else {
        throw std::invalid_argument("block sizes: expected none, one, or one per population");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (sizes[i] < 1 || sizes[i] > series_lengths[i])
            throw std::invalid_argument("block size " + std::to_string(sizes[i]) +
                                        " out of range for series of length " + std::to_string(series_lengths[i]));
    }
    return sizes;
}

std::vector<std::uint64_t> resolve_streams(const TestConfig& config, std::size_t k) {
    if (config.population_streams.empty()) {
        std::vector<std::uint64_t> ids(k);
        for (std::size_t i = 0; i < k; ++i) ids[i] = i;
        return ids;
    }
    if (config.population_streams.size() != k)
        throw std::invalid_argument("population_streams: expected one entry per population");
    return config.population_streams;
}

}  // namespace

KernelOperator pooled_mean(std::span<const TensorSequence> populations) {
    require_population_set(populations, "pooled_mean");
    const Eigen::VectorXd pooled = pooled_mean_vector(populations);
    const Eigen::Index L = populations[0].grid()->size();
    return KernelOperator(populations[0].grid(), Eigen::Map<const Eigen::MatrixXd>(pooled.data(), L, L));
}

std::vector<KernelOperator> rolling_block_means(const TensorSequence& seq, int block_len) {
    const BlockPlan plan = make_block_plan(seq.length(), block_len);
    const Eigen::MatrixXd means = offset_window_means(seq.columns(), plan);
    const Eigen::Index L = seq.grid()->size();
    std::vector<KernelOperator> result;
    result.reserve(static_cast<std::size_t>(plan.block_len));
    for (int xi = 0; xi < plan.block_len; ++xi)
        result.emplace_back(seq.grid(), Eigen::Map<const Eigen::MatrixXd>(means.col(xi).data(), L, L));
    return result;
}

TensorSequence null_pseudo_population(const TensorSequence& population, const KernelOperator& pooled,
                                      int block_len, std::span<const int> starts) {
    require_same_grid(population.grid(), pooled.grid(), "null_pseudo_population");
    const BlockPlan plan = make_block_plan(population.length(), block_len);
    const Eigen::MatrixXd window_means = offset_window_means(population.columns(), plan);
    const Eigen::Index L = pooled.grid()->size();
    const Eigen::Map<const Eigen::VectorXd> pooled_vec(pooled.kernel().data(), L * L);
    Eigen::MatrixXd out;
    materialize_pseudo_columns(population.columns(), window_means, pooled_vec, plan, starts, out);
    return TensorSequence(population.grid(), population.lag(), std::move(out));
}

std::vector<TensorSequence> null_pseudo_sample(std::span<const TensorSequence> populations,
                                               const TestConfig& config, RngSeed rng) {
    require_population_set(populations, "null_pseudo_sample");
    std::vector<int> series_lengths;
    series_lengths.reserve(populations.size());
    for (const TensorSequence& pop : populations) series_lengths.push_back(pop.length() + pop.lag());
    const std::vector<int> block_sizes = resolve_block_sizes(config, series_lengths);
    const std::vector<std::uint64_t> streams = resolve_streams(config, populations.size());

    const Eigen::VectorXd pooled = pooled_mean_vector(populations);
    std::vector<TensorSequence> result;
    result.reserve(populations.size());
    Eigen::MatrixXd workspace;
    for (std::size_t i = 0; i < populations.size(); ++i) {
        const BlockPlan plan = make_block_plan(populations[i].length(), block_sizes[i]);
        const Eigen::MatrixXd window_means = offset_window_means(populations[i].columns(), plan);
        Rng engine(rng.child(streams[i]));
        const std::vector<int> starts = draw_block_starts(plan, engine);
        materialize_pseudo_columns(populations[i].columns(), window_means, pooled, plan, starts, workspace);
        result.emplace_back(populations[i].grid(), populations[i].lag(), workspace);
    }
    return result;
}

double statistic_tm(const TensorSequence& pop1, const TensorSequence& pop2) {
    require_same_grid(pop1.grid(), pop2.grid(), "statistic_tm");
    const Eigen::VectorXd mean1 = pop1.columns().rowwise().mean();
    const Eigen::VectorXd mean2 = pop2.columns().rowwise().mean();
    return pair_statistic(mean1, pop1.length(), mean2, pop2.length(), pop1.length() + pop2.length(),
                          pop1.grid()->kernel_weights());
}

double statistic_tm_multi(std::span<const TensorSequence> populations) {
    require_population_set(populations, "statistic_tm_multi");
    std::vector<Eigen::VectorXd> means;
    std::vector<int> sizes;
    means.reserve(populations.size());
    sizes.reserve(populations.size());
    for (const TensorSequence& pop : populations) {
        means.push_back(pop.columns().rowwise().mean());
        sizes.push_back(pop.length());
    }
    return multi_statistic_from_means(means, sizes, populations[0].grid()->kernel_weights());
}

int default_block_size(int n) {
    if (n < 1) throw std::invalid_argument("default_block_size: series length must be positive");
    const auto pow10 = [](long long b) {
        unsigned __int128 r = 1;
        for (int i = 0; i < 10; ++i) r *= static_cast<unsigned __int128>(b);
        return r;
    };
    const unsigned __int128 n_cubed =
        static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(n);
    long long b = static_cast<long long>(std::ceil(std::pow(static_cast<double>(n), 0.3)));
    if (b < 1) b = 1;
    while (b > 1 && pow10(b - 1) >= n_cubed) --b;
    while (pow10(b) < n_cubed) ++b;
    if (b > n) b = n;
    return static_cast<int>(b);
}

double bootstrap_p_value(double t_observed, std::span<const double> t_bootstrap) {
    if (t_bootstrap.empty()) throw std::invalid_argument("bootstrap_p_value: empty bootstrap sample");
    std::size_t count = 0;
    for (double t : t_bootstrap)
        if (t >= t_observed) ++count;
    return static_cast<double>(1 + count) / static_cast<double>(t_bootstrap.size() + 1);
}

double bootstrap_critical_value(std::span<const double> t_bootstrap, double alpha) {
    if (t_bootstrap.empty()) throw std::invalid_argument("bootstrap_critical_value: empty bootstrap sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bootstrap_critical_value: alpha must lie in (0, 1)");
    const auto b = static_cast<long long>(t_bootstrap.size());
    // The small backoff keeps products like 0.95 * (B + 1) that are integers
    // in exact arithmetic from ceiling one rank too high.
    long long rank = static_cast<long long>(std::ceil((1.0 - alpha) * static_cast<double>(b + 1) - 1e-9));
    rank = std::clamp(rank, 1LL, b);
    std::vector<double> sorted(t_bootstrap.begin(), t_bootstrap.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[static_cast<std::size_t>(rank - 1)];
}

BootstrapRun bootstrap_statistics(std::span<const FunctionalSeries> populations, const TestConfig& config) {
    if (populations.size() < 2) throw std::invalid_argument("bootstrap_statistics: need at least 2 populations");
    if (config.replicates < 1) throw std::invalid_argument("bootstrap_statistics: need at least one replicate");
    for (std::size_t i = 1; i < populations.size(); ++i)
        require_same_grid(populations[0].grid(), populations[i].grid(), "bootstrap_statistics");

    const std::size_t k = populations.size();
    std::vector<TensorSequence> sequences;
    sequences.reserve(k);
    std::vector<int> series_lengths;
    series_lengths.reserve(k);
    for (const FunctionalSeries& s : populations) {
        sequences.push_back(tensor_sequence(s, 0));
        series_lengths.push_back(s.length());
    }
    const std::vector<int> block_sizes = resolve_block_sizes(config, series_lengths);
    const std::vector<std::uint64_t> streams = resolve_streams(config, k);

    // Observed statistic on the original tensor sequences.
    BootstrapRun run;
    run.sample_sizes = series_lengths;
    run.block_sizes = block_sizes;
    run.t_observed = (k == 2) ? statistic_tm(sequences[0], sequences[1])
                              : statistic_tm_multi(sequences);

    // Replicate-independent pieces of the resampling scheme.
    const Eigen::VectorXd pooled = pooled_mean_vector(sequences);
    std::vector<BlockPlan> plans;
    std::vector<Eigen::MatrixXd> window_means;
    plans.reserve(k);
    window_means.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        plans.push_back(make_block_plan(sequences[i].length(), block_sizes[i]));
        window_means.push_back(offset_window_means(sequences[i].columns(), plans[i]));
    }
    const Eigen::VectorXd& kernel_weights = populations[0].grid()->kernel_weights();

    struct Workspace {
        std::vector<Eigen::MatrixXd> pseudo;
        std::vector<Eigen::VectorXd> means;
    };
    run.t_bootstrap.resize(static_cast<std::size_t>(config.replicates));
    parallel_for_indexed(
        config.replicates,
        [&] {
            Workspace ws;
            ws.pseudo.resize(k);
            ws.means.resize(k);
            return ws;
        },
        [&](Workspace& ws, int r) {
            const RngSeed replicate_seed = config.seed.child(static_cast<std::uint64_t>(r));
            for (std::size_t i = 0; i < k; ++i) {
                Rng engine(replicate_seed.child(streams[i]));
                const std::vector<int> starts = draw_block_starts(plans[i], engine);
                materialize_pseudo_columns(sequences[i].columns(), window_means[i], pooled, plans[i], starts,
                                           ws.pseudo[i]);
                ws.means[i] = ws.pseudo[i].rowwise().mean();
            }
            double stat;
            if (k == 2) {
                stat = pair_statistic(ws.means[0], plans[0].n_eff, ws.means[1], plans[1].n_eff,
                                      plans[0].n_eff + plans[1].n_eff, kernel_weights);
            } else {
                std::vector<int> sizes;
                sizes.reserve(k);
                for (const auto& plan : plans) sizes.push_back(plan.n_eff);
                stat = multi_statistic_from_means(ws.means, sizes, kernel_weights);
            }
            run.t_bootstrap[static_cast<std::size_t>(r)] = stat;
        });
    return run;
}

TestReport run_test(std::span<const FunctionalSeries> populations, const TestConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("run_test: alpha must lie in (0, 1)");
    BootstrapRun run = bootstrap_statistics(populations, config);

    TestReport report;
    report.t_observed = run.t_observed;
    report.t_bootstrap = std::move(run.t_bootstrap);
    report.p_value = bootstrap_p_value(report.t_observed, report.t_bootstrap);
    report.critical_value = bootstrap_critical_value(report.t_bootstrap, config.alpha);
    report.reject = report.t_observed > report.critical_value;
    report.sample_sizes = std::move(run.sample_sizes);
    report.total_observations = 0;
    for (int n : report.sample_sizes) report.total_observations += n;
    report.block_sizes = std::move(run.block_sizes);
    report.replicates = config.replicates;
    report.alpha = config.alpha;
    report.seed = config.seed;
    return report;
}

}  // namespace fts
