#pragma once

// Gaussian mean / variance experiments. The panel functions are the
// building blocks the experiments (and the acceptance checks) share.

#include <functional>
#include <optional>
#include <vector>

#include "synmix/conjugate.h"
#include "synmix/experiment/bundle.h"
#include "synmix/experiment/config.h"
#include "synmix/grid.h"
#include "synmix/mixing.h"
#include "synmix/rng.h"

namespace synmix::experiment {

enum class MeanGenerator { known_variance, unknown_variance };

struct MeanPanelSpec {
    MeanGenerator generator = MeanGenerator::known_variance;
    KnownVarModel provider{GaussianDist(0.0, 100.0), 4.0};
    NixModel provider_nix{0.0, 0.04, 1.0, 4.0};
    KnownVarModel analyst{GaussianDist(0.0, 100.0), 4.0};
    std::size_t m = 400;
    std::size_t n_star = 2000;
    std::size_t samples_per_dataset = 250;
    std::size_t grid_points = 4096;
};

struct MeanPanelResult {
    MixturePosterior mixture;
    MixtureMoments moments;
    GaussianDist analyst_real{0.0, 1.0};
    /// Provider's marginal posterior of mu on the real data (normal, or
    /// Student-t under the NIX generator); mean and variance.
    double provider_mean = 0.0;
    double provider_variance = 0.0;
    std::function<double(double)> provider_pdf;
    GridDensity mixture_density{{0.0, 1.0}, {0.0, 0.0}};
    GridDensity provider_density{{0.0, 1.0}, {0.0, 0.0}};
    GridDensity analyst_density{{0.0, 1.0}, {0.0, 0.0}};
    double tv_provider = 0.0;
    double tv_analyst = 0.0;
};

/// Synthesises m data sets of n* from the provider's posterior predictive
/// given `real`, mixes the analyst's posteriors and compares densities.
MeanPanelResult run_mean_panel(const MeanPanelSpec& spec, const std::vector<double>& real, const RngStream& rng);

struct CorrectionResult {
    double mixture_variance = 0.0;
    double expected_component_variance = 0.0;
    double provider_variance = 0.0;
    double inflation = 0.0;  // mixture / provider variance
    std::optional<double> corrected_variance;  // empty when infeasible
    double tv_raw = 0.0;
    double tv_corrected = 0.0;
};

/// Variance correction on a finished panel with ratio c = n*/n_x.
CorrectionResult correct_panel(const MeanPanelResult& panel, double c);

struct VariancePanelSpec {
    KnownMeanModel provider{ScaledInvChiSq(1.0, 1.0), 1.0};
    KnownMeanModel analyst{ScaledInvChiSq(1.0, 1.0), 0.0};
    std::size_t m = 400;
    std::size_t n_star = 2000;
    std::size_t samples_per_dataset = 250;
    std::size_t grid_points = 4096;
};

struct VariancePanelResult {
    MixturePosterior mixture;
    ScaledInvChiSq provider_real{1.0, 1.0};
    ScaledInvChiSq analyst_real{1.0, 1.0};
    double offset = 0.0;  // (provider mean - analyst mean)^2
    double provider_mean = 0.0;
    double mixture_mean = 0.0;           // analytic
    double pooled_mean = 0.0;            // pooled draws
    double corrected_pooled_mean = 0.0;  // pooled draws after the mean correction
    std::size_t negative_after_correction = 0;
    GridDensity mixture_density{{0.0, 1.0}, {0.0, 0.0}};
    GridDensity corrected_density{{0.0, 1.0}, {0.0, 0.0}};
    GridDensity provider_density{{0.0, 1.0}, {0.0, 0.0}};
    GridDensity analyst_density{{0.0, 1.0}, {0.0, 0.0}};
    double tv_provider = 0.0;
    double tv_analyst = 0.0;
    double tv_corrected_provider = 0.0;
};

VariancePanelResult run_variance_panel(const VariancePanelSpec& spec, const std::vector<double>& real,
                                       const RngStream& rng);

/// Real data X ~ N(true_mean, true_variance)^n_x.
std::vector<double> simulate_real_data(double mean, double variance, std::size_t n, RngStream rng);

/// Panel spec from the config's model keys (generator chosen by caller).
MeanPanelSpec mean_panel_spec(const ExperimentConfig& cfg, double analyst_variance, std::size_t m, double c);

/// Root stream for repetition `rep` of an experiment.
RngStream repetition_stream(const ExperimentConfig& cfg, std::size_t rep);

ResultBundle run_gauss_known_known(const ExperimentConfig& cfg);
ResultBundle run_gauss_unknown_known(const ExperimentConfig& cfg);
ResultBundle run_gauss_known_mean(const ExperimentConfig& cfg);
ResultBundle run_gauss_sweep(const ExperimentConfig& cfg);
ResultBundle run_gauss_correction(const ExperimentConfig& cfg);
ResultBundle run_rate_check(const ExperimentConfig& cfg);

}  // namespace synmix::experiment
