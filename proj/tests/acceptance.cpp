// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// to execute everything, or pass criterion numbers to select a subset.
// --cli <path> points at the command-line binary (criterion 9).

#include <sys/wait.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fts/cli.hpp"
#include "fts/parallel.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fts;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string format(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

TensorSequence random_sequence(const GridPtr& grid, int length, Rng& rng) {
    const Eigen::Index ll = static_cast<Eigen::Index>(grid->size()) * grid->size();
    Eigen::MatrixXd cols(ll, length);
    for (int t = 0; t < length; ++t)
        for (Eigen::Index i = 0; i < ll; ++i) cols(i, t) = 2.0 * rng.uniform01() - 1.0;
    return TensorSequence(grid, 0, cols);
}

// ---------------------------------------------------------------------------
// Criterion 1: exhaustive enumeration equals mbb_expectation for all
// (n_eff <= 8, b <= 4), and the boundary-tapered closed form in divisible
// cases. Tolerance 1e-12, runtime < 1 s.
// ---------------------------------------------------------------------------
Outcome criterion1() {
    const GridPtr grid = make_grid(2);
    Rng rng(RngSeed{101, 0});
    const double t0 = now_seconds();
    double worst = 0.0;
    for (int n_eff = 1; n_eff <= 8; ++n_eff) {
        for (int b = 1; b <= std::min(4, n_eff); ++b) {
            const TensorSequence seq = random_sequence(grid, n_eff, rng);
            const int n = n_eff;  // lag zero
            const Eigen::VectorXd enumerated = oracle::enumerate_bootstrap_mean(seq.columns(), b, n);
            const Eigen::MatrixXd k = mbb_expectation(seq, b, n).kernel();
            const Eigen::Map<const Eigen::VectorXd> impl(k.data(), 4);
            worst = std::max(worst, (impl - enumerated).cwiseAbs().maxCoeff());

            if (n_eff % b == 0) {
                // Closed form, written out independently: (m/(N n)) *
                // [ sum_t Y_t - sum_{j=1}^{b-1} (1 - j/b)(Y_j + Y_{m-j+1}) ].
                const int m = n_eff;
                const int blocks = m - b + 1;
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(4);
                for (int t = 0; t < m; ++t) acc += seq.columns().col(t);
                for (int j = 1; j <= b - 1; ++j)
                    acc -= (1.0 - static_cast<double>(j) / b) * (seq.columns().col(j - 1) + seq.columns().col(m - j));
                const Eigen::VectorXd closed = acc * (static_cast<double>(m) / (static_cast<double>(blocks) * n));
                worst = std::max(worst, (impl - closed).cwiseAbs().maxCoeff());
            }
        }
    }
    const double elapsed = now_seconds() - t0;
    Outcome out;
    out.pass = worst < 1e-12 && elapsed < 1.0;
    out.detail = "max deviation " + format(worst, 3) + ", " + format(elapsed, 3) + " s";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: enumeration mean of every pseudo element equals the pooled
// mean for K=2, n_i <= 6, b_i <= 3. Tolerance 1e-12, runtime < 1 s.
// ---------------------------------------------------------------------------
Outcome criterion2() {
    const GridPtr grid = make_grid(2);
    Rng rng(RngSeed{102, 0});
    const double t0 = now_seconds();
    double worst = 0.0;
    for (const int n1 : {4, 5, 6}) {
        for (const int b1 : {1, 2, 3}) {
            for (const auto& [n2, b2] : std::vector<std::pair<int, int>>{{4, 2}, {6, 3}, {5, 1}}) {
                const std::vector<TensorSequence> pops{random_sequence(grid, n1, rng),
                                                       random_sequence(grid, n2, rng)};
                const KernelOperator pooled = pooled_mean(pops);
                const Eigen::Map<const Eigen::VectorXd> pooled_vec(pooled.kernel().data(), 4);
                const int block_sizes[2] = {b1, b2};
                // Pseudo elements of population i depend only on population
                // i's block starts, so each tuple space is enumerated on its
                // own.
                for (int i = 0; i < 2; ++i) {
                    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, pops[i].length());
                    long long count = 0;
                    oracle::for_each_block_tuple(pops[i].length(), block_sizes[i], [&](const std::vector<int>& starts) {
                        acc += null_pseudo_population(pops[i], pooled, block_sizes[i], starts).columns();
                        ++count;
                    });
                    acc /= static_cast<double>(count);
                    for (int t = 0; t < pops[i].length(); ++t)
                        worst = std::max(worst, (acc.col(t) - pooled_vec).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    const double elapsed = now_seconds() - t0;
    Outcome out;
    out.pass = worst < 1e-12 && elapsed < 1.0;
    out.detail = "max deviation " + format(worst, 3) + ", " + format(elapsed, 3) + " s";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: HS algebra: norm factorization, bilinearity, symmetry,
// lag-zero kernel symmetry and quadrature-PSD. 1000 randomized cases each,
// 1e-10 relative, < 5 s.
// ---------------------------------------------------------------------------
Outcome criterion3() {
    const double t0 = now_seconds();
    Rng rng(RngSeed{103, 0});
    double worst_rel = 0.0;
    bool structure_ok = true;

    const auto rel_err = [](double got, double want) {
        const double scale = std::max(1.0, std::abs(want));
        return std::abs(got - want) / scale;
    };

    for (int rep = 0; rep < 1000; ++rep) {
        const GridPtr grid = make_grid(5 + static_cast<int>(rng.uniform_below(20)));
        const int L = grid->size();
        Eigen::VectorXd fv(L), gv(L);
        Eigen::MatrixXd ma(L, L), mb(L, L), mc(L, L);
        for (int i = 0; i < L; ++i) {
            fv[i] = 2.0 * rng.uniform01() - 1.0;
            gv[i] = 2.0 * rng.uniform01() - 1.0;
            for (int j = 0; j < L; ++j) {
                ma(i, j) = 2.0 * rng.uniform01() - 1.0;
                mb(i, j) = 2.0 * rng.uniform01() - 1.0;
                mc(i, j) = 2.0 * rng.uniform01() - 1.0;
            }
        }
        const Curve f(grid, fv), g(grid, gv);
        const KernelOperator a(grid, ma), b(grid, mb), c(grid, mc);

        // ||f (x) g||_HS = ||f|| ||g||
        worst_rel = std::max(worst_rel, rel_err(hs_norm(tensor_product(f, g)), l2_norm(f) * l2_norm(g)));
        // symmetry
        worst_rel = std::max(worst_rel, rel_err(hs_inner(a, b), hs_inner(b, a)));
        // bilinearity
        const double s = 2.0 * rng.uniform01() - 1.0;
        const double u = 2.0 * rng.uniform01() - 1.0;
        const KernelOperator combo(grid, s * ma + u * mb);
        worst_rel = std::max(worst_rel, rel_err(hs_inner(combo, c), s * hs_inner(a, c) + u * hs_inner(b, c)));

        // lag-zero kernel symmetry and quadrature-PSD on a small series
        const int n = 4 + static_cast<int>(rng.uniform_below(8));
        Eigen::MatrixXd rows(n, L);
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < L; ++j) rows(t, j) = 2.0 * rng.uniform01() - 1.0;
        const FunctionalSeries series(grid, rows);
        const Eigen::MatrixXd k0 = empirical_autocov(series, 0).kernel();
        if ((k0 - k0.transpose()).cwiseAbs().maxCoeff() != 0.0) structure_ok = false;
        Eigen::VectorXd v(L);
        for (int i = 0; i < L; ++i) v[i] = 2.0 * rng.uniform01() - 1.0;
        const Eigen::VectorXd wv = grid->weights().cwiseProduct(v);
        if (wv.dot(k0 * wv) < -1e-10) structure_ok = false;
    }
    const double elapsed = now_seconds() - t0;
    Outcome out;
    out.pass = worst_rel < 1e-10 && structure_ok && elapsed < 5.0;
    out.detail = "max relative deviation " + format(worst_rel, 3) + ", " + format(elapsed, 3) + " s";
    return out;
}

// ---------------------------------------------------------------------------
// Criteria 4-6 share one table: FAR and FMA at delta in {0, .2, .5, .8},
// n = 200, b = 5, alpha = 0.05, B = 500, R = 500, smoothing with 21 Fourier
// basis functions.
// ---------------------------------------------------------------------------
struct PowerTable {
    // [family][delta index] at block size 5; families FAR=0, FMA=1.
    double rates05[2][4];
    double stderrs05[2][4];
    double rates10[2][4];
    double stderrs10[2][4];
    // FAR delta=0 at alpha=0.05 for block sizes 2, 5, 10.
    double far_null_by_block[3];
};

const std::vector<double>& table_deltas() {
    static const std::vector<double> deltas{0.0, 0.2, 0.5, 0.8};
    return deltas;
}

const PowerTable& power_table() {
    static const PowerTable table = [] {
        PowerTable t{};
        const GridPtr grid = make_grid(21);
        const ModelFamily families[2] = {ModelFamily::FAR, ModelFamily::FMA};
        for (int fam = 0; fam < 2; ++fam) {
            for (std::size_t d = 0; d < table_deltas().size(); ++d) {
                ExperimentSpec spec;
                spec.model1.family = families[fam];
                spec.model1.delta = 0.0;
                spec.model1.n = 200;
                spec.model1.grid = grid;
                spec.model2 = spec.model1;
                spec.model2.delta = table_deltas()[d];
                const bool far_null = (fam == 0 && d == 0);
                spec.block_sizes = far_null ? std::vector<int>{2, 5, 10} : std::vector<int>{5};
                spec.alphas = {0.05, 0.10};
                spec.bootstrap_replicates = 500;
                spec.repetitions = 500;
                spec.smooth_basis = 21;
                spec.seed = RngSeed{7701, 100 * static_cast<std::uint64_t>(fam) + d};
                const ExperimentResult result = run_experiment(spec);
                const Eigen::Index row5 = far_null ? 1 : 0;  // position of block size 5
                t.rates05[fam][d] = result.rejection_rates(row5, 0);
                t.stderrs05[fam][d] = result.std_errors(row5, 0);
                t.rates10[fam][d] = result.rejection_rates(row5, 1);
                t.stderrs10[fam][d] = result.std_errors(row5, 1);
                if (far_null)
                    for (int j = 0; j < 3; ++j) t.far_null_by_block[j] = result.rejection_rates(j, 0);
                std::fprintf(stderr, "  [table] %s delta=%.1f rate(a=.05)=%.3f rate(a=.10)=%.3f\n",
                             to_string(families[fam]), table_deltas()[d], t.rates05[fam][d], t.rates10[fam][d]);
            }
        }
        return t;
    }();
    return table;
}

Outcome criterion4() {
    const PowerTable& t = power_table();
    Outcome out;
    out.pass = true;
    std::ostringstream detail;
    detail << "FAR delta=0 rejection rates by block size (2, 5, 10):";
    for (int j = 0; j < 3; ++j) {
        detail << ' ' << format(t.far_null_by_block[j], 3);
        if (!(t.far_null_by_block[j] >= 0.03 && t.far_null_by_block[j] <= 0.09)) out.pass = false;
    }
    detail << " (band [0.03, 0.09])";
    out.detail = detail.str();
    return out;
}

Outcome criterion5() {
    const double far_strong = power_table().rates05[0][3];
    const double fma_strong = power_table().rates05[1][3];
    Outcome out;
    out.pass = far_strong >= 0.95 && fma_strong >= 0.80;
    out.detail = "FAR delta=0.8 rate " + format(far_strong, 3) + " (>= 0.95), FMA delta=0.8 rate " +
                 format(fma_strong, 3) + " (>= 0.80)";
    return out;
}

Outcome criterion6() {
    const PowerTable& t = power_table();
    Outcome out;
    std::ostringstream detail;
    for (int fam = 0; fam < 2; ++fam) {
        detail << (fam ? " FMA:" : "FAR:");
        for (std::size_t d = 0; d < 4; ++d) detail << ' ' << format(t.rates05[fam][d], 3);
        for (std::size_t d = 1; d < 4; ++d) {
            const double slack05 = 2.0 * std::sqrt(t.stderrs05[fam][d] * t.stderrs05[fam][d] +
                                                   t.stderrs05[fam][d - 1] * t.stderrs05[fam][d - 1]);
            if (t.rates05[fam][d] < t.rates05[fam][d - 1] - slack05) out.pass = false;
            const double slack10 = 2.0 * std::sqrt(t.stderrs10[fam][d] * t.stderrs10[fam][d] +
                                                   t.stderrs10[fam][d - 1] * t.stderrs10[fam][d - 1]);
            if (t.rates10[fam][d] < t.rates10[fam][d - 1] - slack10) out.pass = false;
        }
    }
    // FMA power ordering at the 10% level between the two strongest deviations.
    if (!(t.rates10[1][3] > t.rates10[1][2])) out.pass = false;
    out.detail = detail.str() + (out.pass ? " (monotone within 2 se at both levels)" : " (monotonicity violated)");
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: bootstrap law vs sampling law of sqrt(n)||C_0_hat - C_0||_HS
// for i.i.d. Brownian bridges, n = 400, b = 5: 90th percentiles within 15%.
// ---------------------------------------------------------------------------
Outcome criterion7() {
    const GridPtr grid = make_grid(21);
    const int n = 400;
    const int L = grid->size();

    // High-precision Monte-Carlo reference for the true lag-zero operator.
    Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(L, L);
    {
        const RngSeed oracle_seed{880001, 0};
        for (int i = 0; i < 50000; ++i) {
            const Eigen::VectorXd v = brownian_bridge(grid, oracle_seed.child(static_cast<std::uint64_t>(i))).values();
            c0.noalias() += v * v.transpose();
        }
        c0 /= 50000.0;
    }
    const KernelOperator truth(grid, c0);

    // Sampling distribution over 500 independent series.
    ModelSpec spec;
    spec.family = ModelFamily::IID;
    spec.n = n;
    spec.grid = grid;
    std::vector<double> sampling(500);
    parallel_for(500, [&](int r) {
        const FunctionalSeries s = simulate(spec, RngSeed{880002, static_cast<std::uint64_t>(r)});
        const KernelOperator chat = empirical_autocov(s, 0);
        const KernelOperator diff(grid, chat.kernel() - truth.kernel());
        sampling[static_cast<std::size_t>(r)] = std::sqrt(static_cast<double>(n)) * hs_norm(diff);
    });

    // Bootstrap distribution conditional on one series.
    const FunctionalSeries conditioning = simulate(spec, RngSeed{880003, 0});
    const std::vector<double> boot = mbb_clt_sample(conditioning, 0, 5, 1000, RngSeed{880004, 0});

    const double q_sampling = oracle::percentile(sampling, 0.9);
    const double q_boot = oracle::percentile(boot, 0.9);
    const double rel = std::abs(q_boot - q_sampling) / q_sampling;

    Outcome out;
    out.pass = rel <= 0.15;
    out.detail = "90th percentiles: bootstrap " + format(q_boot, 4) + " vs sampling " + format(q_sampling, 4) +
                 " (relative gap " + format(rel, 3) + ", limit 0.15)";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 8: block-size rule values.
// ---------------------------------------------------------------------------
Outcome criterion8() {
    Outcome out;
    const int b92 = default_block_size(92);
    const int b200 = default_block_size(200);
    out.pass = (b92 == 4) && (b200 == 5);
    out.detail = "default_block_size(92) = " + std::to_string(b92) + ", default_block_size(200) = " +
                 std::to_string(b200);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 9: the CLI produces byte-identical outputs across reruns and
// thread counts for fixed seeds.
// ---------------------------------------------------------------------------
std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Outcome criterion9(const std::string& cli) {
    Outcome out;
    if (cli.empty()) {
        out.pass = false;
        out.detail = "no --cli path given (or FTS_CLI unset)";
        return out;
    }
    const fs::path dir = fs::temp_directory_path() / "fts_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // Panels: two independent simulated populations, full precision.
    {
        ModelSpec spec;
        spec.family = ModelFamily::FAR;
        spec.n = 60;
        spec.grid = make_grid(21);
        for (int p = 0; p < 2; ++p) {
            const FunctionalSeries s = simulate(spec, RngSeed{990001, static_cast<std::uint64_t>(p)});
            std::ofstream csv(dir / ("pop" + std::to_string(p) + ".csv"), std::ios::binary);
            char buf[32];
            for (int t = 0; t < s.length(); ++t) {
                for (int j = 0; j < s.grid()->size(); ++j) {
                    if (j) csv << ',';
                    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s.data()(t, j));
                    csv.write(buf, ptr - buf);
                }
                csv << '\n';
            }
        }
    }

    const std::string base = "\"" + cli + "\"";
    const std::string pops = " \"" + (dir / "pop0.csv").string() + "\" \"" + (dir / "pop1.csv").string() + "\"";
    struct Run {
        std::string command;
        fs::path output;
    };
    std::vector<Run> runs;
    for (const auto& [label, threads] : std::vector<std::pair<std::string, std::string>>{
             {"t1a", "1"}, {"t1b", "1"}, {"t4", "4"}}) {
        const fs::path report = dir / ("report_" + label + ".json");
        runs.push_back({base + " --threads " + threads + " test" + pops +
                            " --replicates 200 --seed 7 --out \"" + report.string() + "\"",
                        report});
    }
    for (const auto& [label, threads] : std::vector<std::pair<std::string, std::string>>{
             {"t1a", "1"}, {"t1b", "1"}, {"t4", "4"}}) {
        const fs::path csv = dir / ("rates_" + label + ".csv");
        runs.push_back({base + " --threads " + threads +
                            " experiment --family FMA --n 40 --R 8 --B 99 --seed 3 --out \"" + csv.string() + "\"",
                        csv});
    }
    for (const Run& run : runs) {
        if (std::system(run.command.c_str()) != 0) {
            out.pass = false;
            out.detail = "command failed: " + run.command;
            return out;
        }
    }
    // Usage errors must map to exit code 2.
    const int usage_status = std::system((base + " bogus-subcommand > /dev/null 2>&1").c_str());
    if (!WIFEXITED(usage_status) || WEXITSTATUS(usage_status) != 2) {
        out.pass = false;
        out.detail = "usage error did not exit with code 2";
        return out;
    }
    const bool report_ok = read_file(runs[0].output) == read_file(runs[1].output) &&
                           read_file(runs[0].output) == read_file(runs[2].output) &&
                           !read_file(runs[0].output).empty();
    const bool rates_ok = read_file(runs[3].output) == read_file(runs[4].output) &&
                          read_file(runs[3].output) == read_file(runs[5].output) &&
                          !read_file(runs[3].output).empty();
    out.pass = report_ok && rates_ok;
    out.detail = std::string("test report ") + (report_ok ? "byte-identical" : "DIFFERS") +
                 ", experiment table " + (rates_ok ? "byte-identical" : "DIFFERS") +
                 " across reruns and thread counts";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_path;
    if (const char* env = std::getenv("FTS_CLI")) cli_path = env;
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            cli_path = argv[++i];
        } else {
            selected.insert(std::atoi(arg.c_str()));
        }
    }

    struct Entry {
        int number;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries{
        {1, criterion1},
        {2, criterion2},
        {3, criterion3},
        {4, criterion4},
        {5, criterion5},
        {6, criterion6},
        {7, criterion7},
        {8, criterion8},
        {9, [&] { return criterion9(cli_path); }},
    };

    bool all_pass = true;
    for (const Entry& entry : entries) {
        if (!selected.empty() && selected.count(entry.number) == 0) continue;
        const double t0 = now_seconds();
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double elapsed = now_seconds() - t0;
        std::printf("criterion %d: %s - %s [%.1f s]\n", entry.number, outcome.pass ? "PASS" : "FAIL",
                    outcome.detail.c_str(), elapsed);
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
