#include "synmix/conjugate.h"

#include <cmath>

#include "synmix/error.h"
#include "synmix/kernels.h"

namespace synmix {

DataSummary DataSummary::of(std::span<const double> data)
{
    DataSummary s;
    s.n = data.size();
    if (s.n == 0) {
        return s;
    }
    // Single pass about the first element keeps the cancellation small.
    const double shift = data.front();
    const auto m = kernels::shifted_moments(data, shift);
    const double n = static_cast<double>(s.n);
    const double centered = m.sum / n;
    s.mean = shift + centered;
    if (s.n >= 2) {
        const double ss = std::max(0.0, m.sum_sq - n * centered * centered);
        s.s2 = ss / (n - 1.0);
    }
    return s;
}

double DataSummary::mean_sq_dev_about(double center) const noexcept
{
    if (n == 0) {
        return 0.0;
    }
    const double nn = static_cast<double>(n);
    const double d = mean - center;
    return s2 * (nn - 1.0) / nn + d * d;
}

void validate(const KnownVarModel& model)
{
    require(model.known_variance > 0.0, "KnownVarModel: known variance must be > 0");
}

void validate(const NixParams& params)
{
    require(params.kappa > 0.0 && params.nu > 0.0 && params.sigma_sq > 0.0,
            "NixParams: kappa, nu and sigma^2 must be > 0");
}

GaussianDist posterior_known_variance(const KnownVarModel& model, const DataSummary& summary)
{
    validate(model);
    if (summary.n == 0) {
        return model.prior;
    }
    const double n = static_cast<double>(summary.n);
    const double prior_precision = 1.0 / model.prior.variance();
    const double data_precision = n / model.known_variance;
    const double variance = 1.0 / (prior_precision + data_precision);
    const double mean = (model.prior.mean() * prior_precision + summary.mean * data_precision) * variance;
    return GaussianDist(mean, variance);
}

NixPosterior posterior_nix(const NixModel& model, const DataSummary& summary)
{
    validate(model);
    if (summary.n == 0) {
        return model;
    }
    const double n = static_cast<double>(summary.n);
    const double kappa = model.kappa + n;
    const double nu = model.nu + n;
    const double mu = (model.kappa * model.mu + n * summary.mean) / kappa;
    const double diff = summary.mean - model.mu;
    // (n-1) s^2 vanishes for n = 1.
    const double scatter = summary.n >= 2 ? (n - 1.0) * summary.s2 : 0.0;
    const double nu_sigma = model.nu * model.sigma_sq + scatter + model.kappa * n * diff * diff / kappa;
    return NixPosterior{mu, kappa, nu, nu_sigma / nu};
}

ScaledInvChiSq posterior_known_mean(const KnownMeanModel& model, const DataSummary& summary)
{
    if (summary.n == 0) {
        return model.prior;
    }
    const double n = static_cast<double>(summary.n);
    const double v = summary.mean_sq_dev_about(model.known_mean);
    const double nu0 = model.prior.dof();
    return ScaledInvChiSq(nu0 + n, (nu0 * model.prior.scale() + n * v) / (nu0 + n));
}

StudentT nix_marginal_mean(const NixPosterior& posterior)
{
    validate(posterior);
    return StudentT(posterior.nu, posterior.mu, posterior.sigma_sq / posterior.kappa);
}

std::vector<double> posterior_predictive_sample(const KnownVarModel& model, const GaussianDist& posterior,
                                                std::size_t n_star, RngStream& rng)
{
    require(n_star >= 1, "posterior_predictive_sample: n* must be >= 1");
    validate(model);
    const double mu = draw_gaussian(posterior, rng);
    return sample_gaussian(GaussianDist(mu, model.known_variance), n_star, rng);
}

std::vector<double> posterior_predictive_sample(const NixModel& model, const NixPosterior& posterior,
                                                std::size_t n_star, RngStream& rng)
{
    require(n_star >= 1, "posterior_predictive_sample: n* must be >= 1");
    validate(model);
    validate(posterior);
    const double sigma_sq = draw_scaled_inv_chi2(ScaledInvChiSq(posterior.nu, posterior.sigma_sq), rng);
    const double mu = draw_gaussian(GaussianDist(posterior.mu, sigma_sq / posterior.kappa), rng);
    return sample_gaussian(GaussianDist(mu, sigma_sq), n_star, rng);
}

std::vector<double> posterior_predictive_sample(const KnownMeanModel& model, const ScaledInvChiSq& posterior,
                                                std::size_t n_star, RngStream& rng)
{
    require(n_star >= 1, "posterior_predictive_sample: n* must be >= 1");
    const double sigma_sq = draw_scaled_inv_chi2(posterior, rng);
    return sample_gaussian(GaussianDist(model.known_mean, sigma_sq), n_star, rng);
}

}  // namespace synmix
