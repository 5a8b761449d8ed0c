#pragma once

#include "fts/eqtest.hpp"

namespace fts {

enum class ModelFamily { FAR, FMA, IID };

const char* to_string(ModelFamily family) noexcept;
ModelFamily model_family_from_string(const std::string& name);

/// Data-generating process for one population. delta = 0 is the null model;
/// delta > 0 adds a second-lag deviation term. burn_in applies to the FAR
/// recursion only (the FMA and IID models have no transient).
struct ModelSpec {
    ModelFamily family = ModelFamily::FAR;
    double delta = 0.0;
    int n = 200;
    int burn_in = 100;
    GridPtr grid;
};

/// Normalization of the integral kernel's denominator 4 * integral of
/// exp(-t^2): over the unit interval (the default) or over the real line.
enum class PsiNormalization { UnitInterval, RealLine };

/// Brownian bridge sampled at the grid points: cumulative Gaussian increments
/// of variance equal to the spacing, pinned by B(t) = W(t) - t W(1). Both
/// endpoint values are exactly zero. Consumes L-1 normal draws from the seed.
Curve brownian_bridge(const GridPtr& grid, RngSeed rng);

/// Gaussian product kernel psi(u, v) = exp(-(u^2 + v^2)/2) / denom with
/// denom = 4 * integral of exp(-t^2) over the chosen domain. Symmetric.
KernelOperator psi_kernel(const GridPtr& grid,
                          PsiNormalization normalization = PsiNormalization::UnitInterval);

/// Quadrature action of an integral operator: out_i = sum_j w_j K(i,j) f_j.
Curve apply_integral_operator(const KernelOperator& op, const Curve& f);

/// Simulates one series driven by i.i.d. Brownian-bridge innovations through
/// the given integral kernel:
///   FAR: X_t = K X_{t-1} + delta X_{t-2} + B_t, from zero start, burn-in
///        discarded;
///   FMA: X_t = K B_{t-1} + delta B_{t-2} + B_t, with two pre-period
///        innovations;
///   IID: X_t = B_t.
/// Innovation j is drawn from rng.child(j) in generation order (FAR: step
/// order including burn-in; FMA: the two pre-period innovations first).
FunctionalSeries simulate(const ModelSpec& spec, const KernelOperator& kernel, RngSeed rng);

/// simulate() with the default psi_kernel on the spec's grid.
FunctionalSeries simulate(const ModelSpec& spec, RngSeed rng);

/// Least-squares projection of every curve onto the Fourier span
/// {1, sqrt(2) cos(2 pi k t), sqrt(2) sin(2 pi k t) : k = 1..(n_basis-1)/2},
/// evaluated back on the grid. n_basis must be odd and at most L.
FunctionalSeries fourier_smooth(const FunctionalSeries& s, int n_basis);

/// Size/power experiment: R repetitions of (simulate both populations, test
/// at every block size), with rejection decided at every level from one
/// bootstrap sample per block size.
struct ExperimentSpec {
    ModelSpec model1;
    ModelSpec model2;
    std::vector<int> block_sizes;
    std::vector<double> alphas;
    int bootstrap_replicates = 1000;
    int repetitions = 1000;
    RngSeed seed{};
    /// Fourier basis size applied to each simulated series; 0 disables.
    int smooth_basis = 21;
    PsiNormalization psi_normalization = PsiNormalization::UnitInterval;
};

struct ExperimentResult {
    ExperimentSpec spec;
    /// rejection_rates(i, j): rate at block_sizes[i], alphas[j].
    Eigen::MatrixXd rejection_rates;
    /// Binomial Monte-Carlo standard errors sqrt(p (1 - p) / R).
    Eigen::MatrixXd std_errors;
};

/// Runs the experiment. Repetition r derives its streams from seed.child(r),
/// so results are identical for any thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace fts
