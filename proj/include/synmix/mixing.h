#pragma once

// Posterior mixing: m synthetic data sets from a posterior predictive, the
// downstream posterior fitted on each, and the uniform mixture of those
// posteriors as the analyst's approximation. Also hosts the variance and
// known-mean corrections for the Gaussian settings.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "synmix/distributions.h"
#include "synmix/grid.h"
#include "synmix/rng.h"

namespace synmix {

/// Discrete records stored as cell indices of a DiscreteDomain.
struct RecordTable {
    std::vector<std::uint32_t> cells;

    bool operator==(const RecordTable&) const = default;
};

using Dataset = std::variant<std::vector<double>, RecordTable>;

std::size_t record_count(const Dataset& data) noexcept;

struct SyntheticCollection {
    std::vector<Dataset> datasets;
    std::size_t records_per_dataset = 0;
    std::string generator_tag;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> stream_ids;
};

/// Produces synthetic data set `index` of `n_star` records.
using DatasetGenerator = std::function<Dataset(std::size_t index, std::size_t n_star, RngStream& rng)>;

/// Multivariate normal; the Cholesky factor is computed once for sampling.
struct MvGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd chol_lower;

    MvGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
};

using ComponentPosterior = std::variant<GaussianDist, ScaledInvChiSq, MvGaussian>;

std::size_t dimension(const ComponentPosterior& c) noexcept;
double marginal_mean(const ComponentPosterior& c, std::size_t coord);
double marginal_variance(const ComponentPosterior& c, std::size_t coord);
double marginal_pdf(const ComponentPosterior& c, std::size_t coord, double x);

struct DownstreamAnalyzer {
    std::string name;
    std::function<ComponentPosterior(const Dataset&)> fit;
};

struct MixturePosterior {
    std::vector<ComponentPosterior> components;
    std::size_t samples_per_dataset = 0;
    /// (m * k) x dim; rows [i*k, (i+1)*k) come from component i.
    Eigen::MatrixXd pooled;

    [[nodiscard]] std::size_t size() const noexcept { return components.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(pooled.cols()); }
    [[nodiscard]] std::vector<double> pooled_column(std::size_t coord) const;
};

struct MixtureMoments {
    double mean = 0.0;
    /// Law of total variance: expected_component_variance + variance of component means.
    double variance = 0.0;
    double expected_component_variance = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

SyntheticCollection generate_collection(const DatasetGenerator& generator, std::string tag, std::size_t m,
                                        std::size_t n_star, const RngStream& rng);

MixturePosterior mix_posteriors(const SyntheticCollection& collection, const DownstreamAnalyzer& analyzer,
                                std::size_t samples_per_dataset, const RngStream& rng);

/// Generates, fits and discards one synthetic data set at a time. Gives the
/// same result as generate_collection followed by mix_posteriors with the
/// same streams, without holding all m data sets in memory.
MixturePosterior synthesize_and_mix(const DatasetGenerator& generator, const DownstreamAnalyzer& analyzer,
                                    std::size_t m, std::size_t n_star, std::size_t samples_per_dataset,
                                    const RngStream& data_rng, const RngStream& mix_rng);

/// Mixture of already-fitted components with k pooled draws from each.
MixturePosterior mix_components(std::vector<ComponentPosterior> components, std::size_t samples_per_dataset,
                                const RngStream& rng);

MixtureMoments mixture_moments(const MixturePosterior& mix, std::size_t coord = 0);

/// Pointwise average of the component marginal densities; with a nonzero
/// `shift` the density of (Q - shift) is tabulated instead.
GridDensity mixture_density(const MixturePosterior& mix, std::vector<double> grid, std::size_t coord = 0,
                            double shift = 0.0);

/// Moment-matched normal of the mixture marginal, for grid placement.
GaussianDist moment_matched(const MixturePosterior& mix, std::size_t coord = 0);

/// (1 + 1/c)^-1 (Var(mu*) - E(sigma_hat^2)); throws when the result is not positive.
double variance_correction(double mixture_variance, double expected_downstream_variance, double c);

struct MeanCorrectedSamples {
    std::vector<double> samples;
    std::size_t negative_count = 0;
};

/// Subtracts (provider_mean - analyst_mean)^2 from every variance draw.
MeanCorrectedSamples mean_correction_known_mean(std::span<const double> samples, double provider_known_mean,
                                                double analyst_known_mean);

/// Equal-tailed interval from pooled-sample quantiles.
Interval credible_interval(const MixturePosterior& mix, double level, std::size_t coord = 0);

/// Linear-interpolation sample quantile (the "type 7" definition).
double sample_quantile(std::span<const double> sorted, double prob);

}  // namespace synmix
