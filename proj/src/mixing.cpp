#include "synmix/mixing.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "synmix/error.h"
#include "synmix/kernels.h"
#include "synmix/parallel.h"

namespace synmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_coord(const ComponentPosterior& c, std::size_t coord)
{
    if (coord >= dimension(c)) {
        throw InvalidArgument("component posterior has no coordinate " + std::to_string(coord));
    }
}

void sample_component(const ComponentPosterior& c, std::size_t k, RngStream& rng, Eigen::Ref<Eigen::MatrixXd> out)
{
    std::visit(overloaded{
                   [&](const GaussianDist& g) {
                       std::normal_distribution<double> normal(g.mean(), g.sd());
                       for (std::size_t r = 0; r < k; ++r) {
                           out(static_cast<Eigen::Index>(r), 0) = normal(rng);
                       }
                   },
                   [&](const ScaledInvChiSq& s) {
                       for (std::size_t r = 0; r < k; ++r) {
                           out(static_cast<Eigen::Index>(r), 0) = draw_scaled_inv_chi2(s, rng);
                       }
                   },
                   [&](const MvGaussian& g) {
                       std::normal_distribution<double> normal;
                       Eigen::VectorXd z(g.mean.size());
                       for (std::size_t r = 0; r < k; ++r) {
                           for (auto& v : z) {
                               v = normal(rng);
                           }
                           out.row(static_cast<Eigen::Index>(r)) = (g.mean + g.chol_lower * z).transpose();
                       }
                   },
               },
               c);
}

}  // namespace

std::size_t record_count(const Dataset& data) noexcept
{
    return std::visit(overloaded{[](const std::vector<double>& v) { return v.size(); },
                                 [](const RecordTable& t) { return t.cells.size(); }},
                      data);
}

MvGaussian::MvGaussian(Eigen::VectorXd m, Eigen::MatrixXd cov) : mean(std::move(m)), covariance(std::move(cov))
{
    require(covariance.rows() == mean.size() && covariance.cols() == mean.size(),
            "MvGaussian: covariance shape does not match mean");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    require(llt.info() == Eigen::Success, "MvGaussian: covariance is not positive definite");
    chol_lower = llt.matrixL();
}

std::size_t dimension(const ComponentPosterior& c) noexcept
{
    return std::visit(overloaded{[](const MvGaussian& g) { return static_cast<std::size_t>(g.mean.size()); },
                                 [](const auto&) { return std::size_t{1}; }},
                      c);
}

double marginal_mean(const ComponentPosterior& c, std::size_t coord)
{
    check_coord(c, coord);
    return std::visit(overloaded{
                          [](const GaussianDist& g) { return g.mean(); },
                          [](const ScaledInvChiSq& s) {
                              const auto m = s.mean();
                              require(m.has_value(), "scaled-inv-chi2 component has no mean (dof <= 2)");
                              return *m;
                          },
                          [&](const MvGaussian& g) { return g.mean(static_cast<Eigen::Index>(coord)); },
                      },
                      c);
}

double marginal_variance(const ComponentPosterior& c, std::size_t coord)
{
    check_coord(c, coord);
    return std::visit(overloaded{
                          [](const GaussianDist& g) { return g.variance(); },
                          [](const ScaledInvChiSq& s) {
                              const auto v = s.variance();
                              require(v.has_value(), "scaled-inv-chi2 component has no variance (dof <= 4)");
                              return *v;
                          },
                          [&](const MvGaussian& g) {
                              const auto j = static_cast<Eigen::Index>(coord);
                              return g.covariance(j, j);
                          },
                      },
                      c);
}

double marginal_pdf(const ComponentPosterior& c, std::size_t coord, double x)
{
    check_coord(c, coord);
    return std::visit(overloaded{
                          [&](const GaussianDist& g) { return g.pdf(x); },
                          [&](const ScaledInvChiSq& s) { return s.pdf(x); },
                          [&](const MvGaussian& g) {
                              const auto j = static_cast<Eigen::Index>(coord);
                              return GaussianDist(g.mean(j), g.covariance(j, j)).pdf(x);
                          },
                      },
                      c);
}

std::vector<double> MixturePosterior::pooled_column(std::size_t coord) const
{
    require(coord < dim(), "pooled_column: coordinate out of range");
    const auto col = pooled.col(static_cast<Eigen::Index>(coord));
    return {col.begin(), col.end()};
}

SyntheticCollection generate_collection(const DatasetGenerator& generator, std::string tag, std::size_t m,
                                        std::size_t n_star, const RngStream& rng)
{
    require(m >= 1, "generate_collection: m must be >= 1");
    require(n_star >= 1, "generate_collection: n* must be >= 1");
    SyntheticCollection out;
    out.records_per_dataset = n_star;
    out.generator_tag = std::move(tag);
    out.seed = rng.seed();
    out.datasets.resize(m);
    out.stream_ids.resize(m);
    parallel_for(m, [&](std::size_t i) {
        RngStream stream = rng.substream(i);
        out.stream_ids[i] = stream.stream_id();
        out.datasets[i] = generator(i, n_star, stream);
        if (record_count(out.datasets[i]) != n_star) {
            throw Error("generate_collection: generator returned a data set of the wrong size at index "
                        + std::to_string(i));
        }
    });
    return out;
}

MixturePosterior mix_components(std::vector<ComponentPosterior> components, std::size_t samples_per_dataset,
                                const RngStream& rng)
{
    require(!components.empty(), "mix_components: need at least one component");
    require(samples_per_dataset >= 1, "mix_components: samples per data set must be >= 1");
    const std::size_t dim = dimension(components.front());
    for (const auto& c : components) {
        require(dimension(c) == dim, "mix_components: components differ in dimension");
    }
    MixturePosterior mix;
    mix.samples_per_dataset = samples_per_dataset;
    mix.pooled.resize(static_cast<Eigen::Index>(components.size() * samples_per_dataset),
                      static_cast<Eigen::Index>(dim));
    mix.components = std::move(components);
    const auto k = static_cast<Eigen::Index>(samples_per_dataset);
    parallel_for(mix.components.size(), [&](std::size_t i) {
        RngStream stream = rng.substream(i);
        sample_component(mix.components[i], samples_per_dataset, stream,
                         mix.pooled.middleRows(static_cast<Eigen::Index>(i) * k, k));
    });
    return mix;
}

MixturePosterior mix_posteriors(const SyntheticCollection& collection, const DownstreamAnalyzer& analyzer,
                                std::size_t samples_per_dataset, const RngStream& rng)
{
    require(!collection.datasets.empty(), "mix_posteriors: empty collection");
    std::vector<std::optional<ComponentPosterior>> fitted(collection.datasets.size());
    parallel_for(collection.datasets.size(), [&](std::size_t i) {
        try {
            fitted[i] = analyzer.fit(collection.datasets[i]);
        } catch (const std::exception& e) {
            throw Error("analyzer '" + analyzer.name + "' failed on data set " + std::to_string(i) + ": "
                        + e.what());
        }
    });
    std::vector<ComponentPosterior> components;
    components.reserve(fitted.size());
    for (auto& f : fitted) {
        components.push_back(std::move(*f));
    }
    return mix_components(std::move(components), samples_per_dataset, rng);
}

MixturePosterior synthesize_and_mix(const DatasetGenerator& generator, const DownstreamAnalyzer& analyzer,
                                    std::size_t m, std::size_t n_star, std::size_t samples_per_dataset,
                                    const RngStream& data_rng, const RngStream& mix_rng)
{
    require(m >= 1, "synthesize_and_mix: m must be >= 1");
    require(n_star >= 1, "synthesize_and_mix: n* must be >= 1");
    std::vector<std::optional<ComponentPosterior>> fitted(m);
    parallel_for(m, [&](std::size_t i) {
        RngStream stream = data_rng.substream(i);
        const Dataset data = generator(i, n_star, stream);
        if (record_count(data) != n_star) {
            throw Error("synthesize_and_mix: generator returned a data set of the wrong size at index "
                        + std::to_string(i));
        }
        try {
            fitted[i] = analyzer.fit(data);
        } catch (const std::exception& e) {
            throw Error("analyzer '" + analyzer.name + "' failed on data set " + std::to_string(i) + ": "
                        + e.what());
        }
    });
    std::vector<ComponentPosterior> components;
    components.reserve(m);
    for (auto& f : fitted) {
        components.push_back(std::move(*f));
    }
    return mix_components(std::move(components), samples_per_dataset, mix_rng);
}

MixtureMoments mixture_moments(const MixturePosterior& mix, std::size_t coord)
{
    require(mix.size() > 0, "mixture_moments: empty mixture");
    const double m = static_cast<double>(mix.size());
    double mean = 0.0;
    double expected_var = 0.0;
    for (const auto& c : mix.components) {
        mean += marginal_mean(c, coord);
        expected_var += marginal_variance(c, coord);
    }
    mean /= m;
    expected_var /= m;
    double spread = 0.0;
    for (const auto& c : mix.components) {
        const double d = marginal_mean(c, coord) - mean;
        spread += d * d;
    }
    spread /= m;
    return MixtureMoments{mean, expected_var + spread, expected_var};
}

GaussianDist moment_matched(const MixturePosterior& mix, std::size_t coord)
{
    const auto mm = mixture_moments(mix, coord);
    return GaussianDist(mm.mean, mm.variance);
}

GridDensity mixture_density(const MixturePosterior& mix, std::vector<double> grid, std::size_t coord, double shift)
{
    require(mix.size() > 0, "mixture_density: empty mixture");
    const double weight = 1.0 / static_cast<double>(mix.size());
    std::vector<double> values(grid.size(), 0.0);
    for (const auto& c : mix.components) {
        std::visit(overloaded{
                       [&](const GaussianDist& g) {
                           kernels::add_gaussian_pdf(grid, g.mean() - shift, g.sd(), weight, values);
                       },
                       [&](const MvGaussian& g) {
                           check_coord(c, coord);
                           const auto j = static_cast<Eigen::Index>(coord);
                           kernels::add_gaussian_pdf(grid, g.mean(j) - shift, std::sqrt(g.covariance(j, j)), weight,
                                                     values);
                       },
                       [&](const ScaledInvChiSq& s) {
                           for (std::size_t i = 0; i < grid.size(); ++i) {
                               values[i] += weight * s.pdf(grid[i] + shift);
                           }
                       },
                   },
                   c);
    }
    return GridDensity(std::move(grid), std::move(values));
}

double variance_correction(double mixture_variance, double expected_downstream_variance, double c)
{
    require(mixture_variance > 0.0, "variance_correction: mixture variance must be > 0");
    require(expected_downstream_variance >= 0.0, "variance_correction: expected downstream variance must be >= 0");
    require(c > 0.0, "variance_correction: c must be > 0");
    const double corrected = (mixture_variance - expected_downstream_variance) / (1.0 + 1.0 / c);
    if (!(corrected > 0.0)) {
        throw Error("correction infeasible; increase m or n*");
    }
    return corrected;
}

MeanCorrectedSamples mean_correction_known_mean(std::span<const double> samples, double provider_known_mean,
                                                double analyst_known_mean)
{
    const double d = provider_known_mean - analyst_known_mean;
    const double offset = d * d;
    MeanCorrectedSamples out;
    out.samples.reserve(samples.size());
    for (double s : samples) {
        const double v = s - offset;
        out.negative_count += v < 0.0 ? 1 : 0;
        out.samples.push_back(v);
    }
    return out;
}

double sample_quantile(std::span<const double> sorted, double prob)
{
    require(!sorted.empty(), "sample_quantile: no samples");
    require(prob >= 0.0 && prob <= 1.0, "sample_quantile: probability outside [0, 1]");
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval credible_interval(const MixturePosterior& mix, double level, std::size_t coord)
{
    require(level > 0.0 && level < 1.0, "credible_interval: level must lie in (0, 1)");
    require(mix.pooled.rows() > 0, "credible_interval: no pooled samples");
    auto samples = mix.pooled_column(coord);
    std::sort(samples.begin(), samples.end());
    const double tail = 0.5 * (1.0 - level);
    return Interval{sample_quantile(samples, tail), sample_quantile(samples, 1.0 - tail)};
}

}  // namespace synmix
