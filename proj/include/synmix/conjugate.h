#pragma once

// Conjugate updates and posterior-predictive samplers for the three
// univariate Gaussian models: known variance, unknown mean and variance
// (normal-inverse-chi-squared), and known mean.

#include <cstddef>
#include <span>
#include <vector>

#include "synmix/distributions.h"
#include "synmix/rng.h"

namespace synmix {

/// Sufficient statistics of a univariate sample.
struct DataSummary {
    std::size_t n = 0;
    double mean = 0.0;
    /// Sample variance with n - 1 denominator; 0 when n < 2.
    double s2 = 0.0;

    static DataSummary of(std::span<const double> data);

    /// Mean squared deviation about `center`, (1/n) sum (x_i - center)^2.
    [[nodiscard]] double mean_sq_dev_about(double center) const noexcept;
};

struct KnownVarModel {
    GaussianDist prior;
    double known_variance;
};

/// Normal-inverse-chi-squared parameters. Serves both as the prior
/// (mu0, kappa0, nu0, sigma0^2) and as the posterior (mu_n, kappa_n, nu_n, sigma_n^2).
struct NixParams {
    double mu;
    double kappa;
    double nu;
    double sigma_sq;

    bool operator==(const NixParams&) const = default;
};
using NixModel = NixParams;
using NixPosterior = NixParams;

struct KnownMeanModel {
    ScaledInvChiSq prior;
    double known_mean;
};

void validate(const KnownVarModel& model);
void validate(const NixParams& params);

GaussianDist posterior_known_variance(const KnownVarModel& model, const DataSummary& summary);
NixPosterior posterior_nix(const NixModel& model, const DataSummary& summary);
ScaledInvChiSq posterior_known_mean(const KnownMeanModel& model, const DataSummary& summary);

/// Marginal posterior of the mean under the NIX model.
StudentT nix_marginal_mean(const NixPosterior& posterior);

// Posterior-predictive draws: one parameter draw from the posterior, then
// n_star i.i.d. observations from the likelihood at that parameter.

std::vector<double> posterior_predictive_sample(const KnownVarModel& model, const GaussianDist& posterior,
                                                std::size_t n_star, RngStream& rng);
std::vector<double> posterior_predictive_sample(const NixModel& model, const NixPosterior& posterior,
                                                std::size_t n_star, RngStream& rng);
std::vector<double> posterior_predictive_sample(const KnownMeanModel& model, const ScaledInvChiSq& posterior,
                                                std::size_t n_star, RngStream& rng);

}  // namespace synmix
