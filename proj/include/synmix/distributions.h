#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "synmix/rng.h"

namespace synmix {

/// Univariate normal distribution in (mean, variance) form.
class GaussianDist {
public:
    GaussianDist(double mean, double variance);

    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double variance() const noexcept { return variance_; }
    [[nodiscard]] double sd() const noexcept;

    [[nodiscard]] double pdf(double x) const noexcept;
    [[nodiscard]] double log_pdf(double x) const noexcept;
    [[nodiscard]] double cdf(double x) const noexcept;

    bool operator==(const GaussianDist&) const = default;

private:
    double mean_;
    double variance_;
};

/// Scaled inverse chi-squared, Inv-chi2(nu, s2) = Inv-Gamma(nu/2, nu*s2/2).
class ScaledInvChiSq {
public:
    ScaledInvChiSq(double dof, double scale);

    [[nodiscard]] double dof() const noexcept { return dof_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    /// Defined only for dof > 2.
    [[nodiscard]] std::optional<double> mean() const noexcept;
    /// Defined only for dof > 4.
    [[nodiscard]] std::optional<double> variance() const noexcept;

    [[nodiscard]] double pdf(double x) const noexcept;
    [[nodiscard]] double log_pdf(double x) const noexcept;

    bool operator==(const ScaledInvChiSq&) const = default;

private:
    double dof_;
    double scale_;
};

/// Location-scale Student t; `sq_scale` is the square of the scale parameter.
class StudentT {
public:
    StudentT(double dof, double location, double sq_scale);

    [[nodiscard]] double dof() const noexcept { return dof_; }
    [[nodiscard]] double location() const noexcept { return location_; }
    [[nodiscard]] double sq_scale() const noexcept { return sq_scale_; }

    [[nodiscard]] std::optional<double> variance() const noexcept;
    [[nodiscard]] double pdf(double x) const noexcept;
    [[nodiscard]] double log_pdf(double x) const noexcept;

private:
    double dof_;
    double location_;
    double sq_scale_;
};

double normal_cdf(double x) noexcept;

std::vector<double> sample_gaussian(const GaussianDist& dist, std::size_t count, RngStream& rng);
std::vector<double> sample_scaled_inv_chi2(const ScaledInvChiSq& dist, std::size_t count, RngStream& rng);

double draw_gaussian(const GaussianDist& dist, RngStream& rng);
double draw_scaled_inv_chi2(const ScaledInvChiSq& dist, RngStream& rng);

}  // namespace synmix
