// Command-line front end: testing equality of lag-zero autocovariance
// operators of functional time series with a moving-block-bootstrap, plus the
// size/power simulation runner and a difference-kernel export.

#include <CLI11.hpp>

#include "fts/cli.hpp"
#include "fts/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap equality tests for autocovariance operators of functional time series"};
    app.set_version_flag("--version", fts::cli::kVersion);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker thread limit (default: hardware)");

    fts::cli::TestOptions test_opts;
    CLI::App* test = app.add_subcommand("test", "Test equality of lag-zero autocovariance operators");
    test->add_option("files", test_opts.files, "CSV curve panels, one per population (2+)")->required();
    test->add_option("--block-size", test_opts.block_sizes,
                     "Block size, repeatable per population (default: n^0.3 rule)");
    test->add_option("--replicates", test_opts.replicates, "Bootstrap replicates B");
    test->add_option("--alpha", test_opts.alpha, "Significance level");
    test->add_option("--seed", test_opts.seed, "RNG seed");
    test->add_option("--smooth-basis", test_opts.smooth_basis, "Odd Fourier basis size; 0 = no smoothing");
    test->add_option("--out", test_opts.out_path, "Report path (default: stdout)");

    fts::cli::DiffKernelOptions diff_opts;
    CLI::App* diff = app.add_subcommand("diffkernel", "Export squared differences of two covariance kernels");
    diff->add_option("fileA", diff_opts.file_a, "First CSV curve panel")->required();
    diff->add_option("fileB", diff_opts.file_b, "Second CSV curve panel")->required();
    diff->add_option("--out", diff_opts.out_path, "Output CSV path (default: stdout)");

    fts::cli::ExperimentOptions exp_opts;
    CLI::App* experiment = app.add_subcommand("experiment", "Monte-Carlo size/power experiment");
    experiment->add_option("--preset", exp_opts.preset, "Named preset (table1-far-null)");
    experiment->add_option("--family", exp_opts.family, "Model family: FAR, FMA or IID");
    experiment->add_option("--delta", exp_opts.delta, "Deviation parameter of population 2");
    experiment->add_option("--n", exp_opts.n, "Series length per population");
    experiment->add_option("--block-sizes", exp_opts.block_sizes, "Block sizes (default: rule value)");
    experiment->add_option("--alphas", exp_opts.alphas, "Significance levels");
    experiment->add_option("--B", exp_opts.bootstrap_replicates, "Bootstrap replicates per test");
    experiment->add_option("--R", exp_opts.repetitions, "Monte-Carlo repetitions");
    experiment->add_option("--seed", exp_opts.seed, "RNG seed");
    experiment->add_option("--smooth-basis", exp_opts.smooth_basis, "Odd Fourier basis size; 0 = no smoothing");
    experiment->add_option("--psi-norm", exp_opts.psi_normalization,
                           "Kernel normalization: unit (default) or real");
    experiment->add_option("--out", exp_opts.out_path, "Output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fts::cli::kUsageError;
    }

    if (threads > 0) fts::set_max_threads(threads);
    if (test->parsed()) return fts::cli::cmd_test(test_opts);
    if (diff->parsed()) return fts::cli::cmd_diffkernel(diff_opts);
    if (experiment->parsed()) return fts::cli::cmd_experiment(exp_opts);
    return fts::cli::kUsageError;
}
