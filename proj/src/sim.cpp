#include "fts/sim.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fts/parallel.hpp"

namespace fts {

const char* to_string(ModelFamily family) noexcept {
    switch (family) {
        case ModelFamily::FAR: return "FAR";
        case ModelFamily::FMA: return "FMA";
        case ModelFamily::IID: return "IID";
    }
    return "?";
}

ModelFamily model_family_from_string(const std::string& name) {
    if (name == "FAR" || name == "far") return ModelFamily::FAR;
    if (name == "FMA" || name == "fma") return ModelFamily::FMA;
    if (name == "IID" || name == "iid") return ModelFamily::IID;
    throw std::invalid_argument("unknown model family: " + name);
}

namespace {

void validate(const ModelSpec& spec) {
    if (!spec.grid) throw std::invalid_argument("ModelSpec: null grid");
    if (spec.n < 1) throw std::invalid_argument("ModelSpec: series length must be positive");
    if (spec.delta < 0.0) throw std::invalid_argument("ModelSpec: delta must be nonnegative");
    if (spec.burn_in < 0) throw std::invalid_argument("ModelSpec: burn-in must be nonnegative");
}

// Composite Simpson quadrature of exp(-t^2) on [0, 1]; fixed subdivision so
// the constant is bit-identical on every run.
double gauss_integral_unit_interval() {
    constexpr int kIntervals = 1 << 16;
    const double h = 1.0 / kIntervals;
    auto f = [](double t) { return std::exp(-t * t); };
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < kIntervals; i += 2) odd += f(i * h);
    for (int i = 2; i < kIntervals; i += 2) even += f(i * h);
    return h / 3.0 * (f(0.0) + 4.0 * odd + 2.0 * even + f(1.0));
}

}  // namespace

Curve brownian_bridge(const GridPtr& grid, RngSeed rng) {
    if (!grid) throw std::invalid_argument("brownian_bridge: null grid");
    const int L = grid->size();
    const double step_sd = std::sqrt(1.0 / (L - 1));
    Rng engine(rng);
    Eigen::VectorXd walk(L);
    walk[0] = 0.0;
    for (int j = 1; j < L; ++j) walk[j] = walk[j - 1] + step_sd * engine.normal();
    const double end = walk[L - 1];
    Eigen::VectorXd values(L);
    for (int j = 0; j < L; ++j) values[j] = walk[j] - grid->points()[j] * end;
    return Curve(grid, std::move(values));
}

KernelOperator psi_kernel(const GridPtr& grid, PsiNormalization normalization) {
    if (!grid) throw std::invalid_argument("psi_kernel: null grid");
    static const double unit_integral = gauss_integral_unit_interval();
    const double denom = normalization == PsiNormalization::UnitInterval
                             ? 4.0 * unit_integral
                             : 4.0 * std::sqrt(std::numbers::pi);
    const int L = grid->size();
    Eigen::MatrixXd kernel(L, L);
    for (int j = 0; j < L; ++j) {
        const double v = grid->points()[j];
        for (int i = 0; i < L; ++i) {
            const double u = grid->points()[i];
            kernel(i, j) = std::exp(-(u * u + v * v) / 2.0) / denom;
        }
    }
    return KernelOperator(grid, std::move(kernel));
}

Curve apply_integral_operator(const KernelOperator& op, const Curve& f) {
    require_same_grid(op.grid(), f.grid(), "apply_integral_operator");
    return Curve(op.grid(), op.kernel() * f.grid()->weights().cwiseProduct(f.values()));
}

FunctionalSeries simulate(const ModelSpec& spec, const KernelOperator& kernel, RngSeed rng) {
    validate(spec);
    require_same_grid(spec.grid, kernel.grid(), "simulate");
    const int L = spec.grid->size();
    // Quadrature is folded into the operator once; the recursion is then a
    // plain matrix-vector product per step.
    const Eigen::MatrixXd weighted_kernel = kernel.kernel() * spec.grid->weights().asDiagonal();

    Eigen::MatrixXd rows(spec.n, L);
    std::uint64_t draw = 0;
    auto innovation = [&] { return brownian_bridge(spec.grid, rng.child(draw++)).values(); };

    switch (spec.family) {
        case ModelFamily::IID: {
            for (int t = 0; t < spec.n; ++t) rows.row(t) = innovation().transpose();
            break;
        }
        case ModelFamily::FMA: {
            Eigen::VectorXd lag2 = innovation();
            Eigen::VectorXd lag1 = innovation();
            for (int t = 0; t < spec.n; ++t) {
                const Eigen::VectorXd fresh = innovation();
                rows.row(t) = (weighted_kernel * lag1 + spec.delta * lag2 + fresh).transpose();
                lag2 = lag1;
                lag1 = fresh;
            }
            break;
        }
        case ModelFamily::FAR: {
            Eigen::VectorXd prev = Eigen::VectorXd::Zero(L);
            Eigen::VectorXd prev2 = Eigen::VectorXd::Zero(L);
            for (int s = 0; s < spec.burn_in + spec.n; ++s) {
                const Eigen::VectorXd x = weighted_kernel * prev + spec.delta * prev2 + innovation();
                prev2 = prev;
                prev = x;
                if (s >= spec.burn_in) rows.row(s - spec.burn_in) = x.transpose();
            }
            break;
        }
    }
    return FunctionalSeries(spec.grid, std::move(rows));
}

FunctionalSeries simulate(const ModelSpec& spec, RngSeed rng) {
    validate(spec);
    return simulate(spec, psi_kernel(spec.grid), rng);
}

FunctionalSeries fourier_smooth(const FunctionalSeries& s, int n_basis) {
    const int L = s.grid()->size();
    if (n_basis < 1 || n_basis % 2 == 0)
        throw std::invalid_argument("fourier_smooth: basis size must be a positive odd integer");
    if (n_basis > L)
        throw std::invalid_argument("fourier_smooth: basis size " + std::to_string(n_basis) +
                                    " exceeds grid size " + std::to_string(L));

    Eigen::MatrixXd basis(L, n_basis);
    basis.col(0).setOnes();
    const double two_pi = 2.0 * std::numbers::pi;
    const double root2 = std::numbers::sqrt2;
    for (int k = 1; k <= (n_basis - 1) / 2; ++k) {
        for (int j = 0; j < L; ++j) {
            const double angle = two_pi * k * s.grid()->points()[j];
            basis(j, 2 * k - 1) = root2 * std::cos(angle);
            basis(j, 2 * k) = root2 * std::sin(angle);
        }
    }
    // Minimum-norm least squares; the rank threshold drops basis columns that
    // vanish on the grid (the top sine frequency when n_basis equals L), so
    // the fitted values are an orthogonal projection and smoothing is
    // idempotent.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
    cod.setThreshold(1e-10);
    const Eigen::MatrixXd coefficients = cod.solve(s.data().transpose());
    return FunctionalSeries(s.grid(), (basis * coefficients).transpose());
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    validate(spec.model1);
    validate(spec.model2);
    require_same_grid(spec.model1.grid, spec.model2.grid, "run_experiment");
    if (spec.repetitions < 1) throw std::invalid_argument("run_experiment: need at least one repetition");
    if (spec.bootstrap_replicates < 1) throw std::invalid_argument("run_experiment: need at least one bootstrap replicate");
    if (spec.block_sizes.empty()) throw std::invalid_argument("run_experiment: no block sizes");
    if (spec.alphas.empty()) throw std::invalid_argument("run_experiment: no levels");
    for (double a : spec.alphas)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("run_experiment: levels must lie in (0, 1)");

    const KernelOperator kernel = psi_kernel(spec.model1.grid, spec.psi_normalization);
    const int n_blocks = static_cast<int>(spec.block_sizes.size());
    const int n_alphas = static_cast<int>(spec.alphas.size());
    const int cells = n_blocks * n_alphas;

    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(spec.repetitions) * cells, 0);
    parallel_for(spec.repetitions, [&](int r) {
        const RngSeed rep = spec.seed.child(static_cast<std::uint64_t>(r));
        FunctionalSeries pop1 = simulate(spec.model1, kernel, rep.child(0));
        FunctionalSeries pop2 = simulate(spec.model2, kernel, rep.child(1));
        if (spec.smooth_basis > 0) {
            pop1 = fourier_smooth(pop1, spec.smooth_basis);
            pop2 = fourier_smooth(pop2, spec.smooth_basis);
        }
        const std::array<FunctionalSeries, 2> populations{std::move(pop1), std::move(pop2)};
        for (int j = 0; j < n_blocks; ++j) {
            TestConfig config;
            config.block_sizes = {spec.block_sizes[static_cast<std::size_t>(j)]};
            config.replicates = spec.bootstrap_replicates;
            config.seed = rep.child(2 + static_cast<std::uint64_t>(j));
            const BootstrapRun run = bootstrap_statistics(populations, config);
            for (int a = 0; a < n_alphas; ++a) {
                const double critical =
                    bootstrap_critical_value(run.t_bootstrap, spec.alphas[static_cast<std::size_t>(a)]);
                rejected[(static_cast<std::size_t>(r) * cells) + static_cast<std::size_t>(j * n_alphas + a)] =
                    run.t_observed > critical ? 1 : 0;
            }
        }
    });

    ExperimentResult result;
    result.spec = spec;
    result.rejection_rates.resize(n_blocks, n_alphas);
    result.std_errors.resize(n_blocks, n_alphas);
    for (int j = 0; j < n_blocks; ++j) {
        for (int a = 0; a < n_alphas; ++a) {
            long long count = 0;
            for (int r = 0; r < spec.repetitions; ++r)
                count += rejected[(static_cast<std::size_t>(r) * cells) + static_cast<std::size_t>(j * n_alphas + a)];
            const double rate = static_cast<double>(count) / spec.repetitions;
            result.rejection_rates(j, a) = rate;
            result.std_errors(j, a) = std::sqrt(rate * (1.0 - rate) / spec.repetitions);
        }
    }
    return result;
}

}  // namespace fts
