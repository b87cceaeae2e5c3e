#include "synmix/distributions.h"

#include <cmath>
#include <numbers>
#include <random>

#include "synmix/error.h"

namespace synmix {

GaussianDist::GaussianDist(double mean, double variance) : mean_(mean), variance_(variance)
{
    require(std::isfinite(mean), "GaussianDist: mean must be finite");
    require(variance > 0.0 && std::isfinite(variance), "GaussianDist: variance must be > 0");
}

double GaussianDist::sd() const noexcept { return std::sqrt(variance_); }

double GaussianDist::pdf(double x) const noexcept { return std::exp(log_pdf(x)); }

double GaussianDist::log_pdf(double x) const noexcept
{
    const double z = x - mean_;
    return -0.5 * (z * z / variance_ + std::log(2.0 * std::numbers::pi * variance_));
}

double GaussianDist::cdf(double x) const noexcept { return normal_cdf((x - mean_) / sd()); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ScaledInvChiSq::ScaledInvChiSq(double dof, double scale) : dof_(dof), scale_(scale)
{
    require(dof > 0.0 && std::isfinite(dof), "ScaledInvChiSq: dof must be > 0");
    require(scale > 0.0 && std::isfinite(scale), "ScaledInvChiSq: scale must be > 0");
}

std::optional<double> ScaledInvChiSq::mean() const noexcept
{
    if (dof_ <= 2.0) {
        return std::nullopt;
    }
    return dof_ / (dof_ - 2.0) * scale_;
}

std::optional<double> ScaledInvChiSq::variance() const noexcept
{
    if (dof_ <= 4.0) {
        return std::nullopt;
    }
    const double d2 = dof_ - 2.0;
    return 2.0 * dof_ * dof_ / (d2 * d2 * (dof_ - 4.0)) * scale_ * scale_;
}

double ScaledInvChiSq::log_pdf(double x) const noexcept
{
    if (x <= 0.0) {
        return -INFINITY;
    }
    const double half = 0.5 * dof_;
    return half * std::log(half) - std::lgamma(half) + half * std::log(scale_) - (half + 1.0) * std::log(x)
           - half * scale_ / x;
}

double ScaledInvChiSq::pdf(double x) const noexcept
{
    return x <= 0.0 ? 0.0 : std::exp(log_pdf(x));
}

StudentT::StudentT(double dof, double location, double sq_scale)
    : dof_(dof), location_(location), sq_scale_(sq_scale)
{
    require(dof > 0.0, "StudentT: dof must be > 0");
    require(sq_scale > 0.0, "StudentT: squared scale must be > 0");
}

std::optional<double> StudentT::variance() const noexcept
{
    if (dof_ <= 2.0) {
        return std::nullopt;
    }
    return sq_scale_ * dof_ / (dof_ - 2.0);
}

double StudentT::log_pdf(double x) const noexcept
{
    const double z2 = (x - location_) * (x - location_) / sq_scale_;
    return std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_)
           - 0.5 * std::log(dof_ * std::numbers::pi * sq_scale_) - 0.5 * (dof_ + 1.0) * std::log1p(z2 / dof_);
}

double StudentT::pdf(double x) const noexcept { return std::exp(log_pdf(x)); }

double draw_gaussian(const GaussianDist& dist, RngStream& rng)
{
    std::normal_distribution<double> normal(dist.mean(), dist.sd());
    return normal(rng);
}

double draw_scaled_inv_chi2(const ScaledInvChiSq& dist, RngStream& rng)
{
    // Inv-Gamma(nu/2, nu s2/2): reciprocal of Gamma(shape nu/2, scale 2/(nu s2)).
    std::gamma_distribution<double> gamma(0.5 * dist.dof(), 2.0 / (dist.dof() * dist.scale()));
    return 1.0 / gamma(rng);
}

std::vector<double> sample_gaussian(const GaussianDist& dist, std::size_t count, RngStream& rng)
{
    require(count >= 1, "sample_gaussian: count must be >= 1");
    std::normal_distribution<double> normal(dist.mean(), dist.sd());
    std::vector<double> out(count);
    for (auto& x : out) {
        x = normal(rng);
    }
    return out;
}

std::vector<double> sample_scaled_inv_chi2(const ScaledInvChiSq& dist, std::size_t count, RngStream& rng)
{
    require(count >= 1, "sample_scaled_inv_chi2: count must be >= 1");
    std::gamma_distribution<double> gamma(0.5 * dist.dof(), 2.0 / (dist.dof() * dist.scale()));
    std::vector<double> out(count);
    for (auto& x : out) {
        x = 1.0 / gamma(rng);
    }
    return out;
}

}  // namespace synmix
