#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "synmix/conjugate.h"
#include "synmix/error.h"
#include "synmix/mixing.h"

using namespace synmix;

namespace {

DatasetGenerator gaussian_generator(const KnownVarModel& model, const GaussianDist& post)
{
    return [model, post](std::size_t, std::size_t n_star, RngStream& rng) -> Dataset {
        return posterior_predictive_sample(model, post, n_star, rng);
    };
}

DownstreamAnalyzer known_variance_analyzer(const KnownVarModel& model)
{
    return {"known-variance", [model](const Dataset& d) -> ComponentPosterior {
                return posterior_known_variance(model, DataSummary::of(std::get<std::vector<double>>(d)));
            }};
}

}  // namespace

TEST_CASE("streaming mixture equals collect-then-mix")
{
    const KnownVarModel model{GaussianDist(0.0, 100.0), 4.0};
    const GaussianDist post(1.0, 0.04);
    const auto gen = gaussian_generator(model, post);
    const auto an = known_variance_analyzer(model);
    const RngStream data(7, 1), mix(7, 2);

    const auto a = synthesize_and_mix(gen, an, 25, 200, 30, data, mix);
    const auto coll = generate_collection(gen, "gauss", 25, 200, data);
    const auto b = mix_posteriors(coll, an, 30, mix);
    REQUIRE(a.size() == b.size());
    CHECK(a.pooled == b.pooled);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::get<GaussianDist>(a.components[i]) == std::get<GaussianDist>(b.components[i]));
    }
    CHECK(coll.stream_ids.size() == 25);
    CHECK(coll.generator_tag == "gauss");
}

TEST_CASE("mixture moments follow the law of total variance")
{
    std::vector<ComponentPosterior> comps = {GaussianDist(0.0, 1.0), GaussianDist(2.0, 3.0), GaussianDist(4.0, 2.0)};
    const auto mix = mix_components(comps, 10, RngStream(1, 1));
    const auto mm = mixture_moments(mix);
    CHECK(mm.mean == doctest::Approx(2.0));
    CHECK(mm.expected_component_variance == doctest::Approx(2.0));
    CHECK(mm.variance == doctest::Approx(2.0 + 8.0 / 3.0));
    CHECK(mix.pooled.rows() == 30);
    const auto g = moment_matched(mix);
    CHECK(g.variance() == doctest::Approx(mm.variance));
}

TEST_CASE("mixture density integrates to one and shifts")
{
    std::vector<ComponentPosterior> comps = {GaussianDist(0.0, 1.0), GaussianDist(3.0, 0.5)};
    const auto mix = mix_components(comps, 5, RngStream(1, 1));
    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i) {
        grid.push_back(-10.0 + 25.0 * i / 4000.0);
    }
    const auto d = mixture_density(mix, grid);
    CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-6));
    const auto s = mixture_density(mix, grid, 0, 1.0);
    // density of Q - 1 at x equals density of Q at x + 1
    const double want = 0.5 * (GaussianDist(0.0, 1.0).pdf(1.0) + GaussianDist(3.0, 0.5).pdf(1.0));
    CHECK(s.values()[1600] == doctest::Approx(want));  // grid[1600] = 0
}

TEST_CASE("variance correction")
{
    CHECK(variance_correction(3.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(variance_correction(2.2, 0.1, 20.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(variance_correction(1.0, 2.0, 1.0), Error);
    CHECK_THROWS_AS(variance_correction(1.0, 0.5, 0.0), InvalidArgument);
}

TEST_CASE("known-mean correction subtracts the squared offset and counts negatives")
{
    const std::vector<double> v = {1.5, 0.5, 2.0};
    const auto c = mean_correction_known_mean(v, 1.0, 0.0);
    CHECK(c.samples == std::vector<double>{0.5, -0.5, 1.0});
    CHECK(c.negative_count == 1);
}

TEST_CASE("quantiles and credible intervals")
{
    const std::vector<double> s = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(sample_quantile(s, 0.0) == 1.0);
    CHECK(sample_quantile(s, 1.0) == 5.0);
    CHECK(sample_quantile(s, 0.5) == 3.0);
    CHECK(sample_quantile(s, 0.1) == doctest::Approx(1.4));

    std::vector<ComponentPosterior> comps(50, GaussianDist(0.0, 1.0));
    const auto mix = mix_components(comps, 2000, RngStream(4, 4));
    const auto ci = credible_interval(mix, 0.9);
    CHECK(ci.lo == doctest::Approx(-1.6449).epsilon(0.03));
    CHECK(ci.hi == doctest::Approx(1.6449).epsilon(0.03));
    CHECK(ci.contains(0.0));
}

TEST_CASE("multivariate components expose their marginals")
{
    Eigen::Vector2d mu(1.0, -1.0);
    Eigen::Matrix2d cov;
    cov << 2.0, 0.3, 0.3, 0.5;
    const ComponentPosterior c = MvGaussian(mu, cov);
    CHECK(dimension(c) == 2);
    CHECK(marginal_mean(c, 1) == -1.0);
    CHECK(marginal_variance(c, 0) == 2.0);
    CHECK(marginal_pdf(c, 1, -1.0) == doctest::Approx(GaussianDist(-1.0, 0.5).pdf(-1.0)));
    const auto mix = mix_components({c, c}, 20000, RngStream(2, 2));
    const Eigen::MatrixXd centered = mix.pooled.rowwise() - mix.pooled.colwise().mean();
    const Eigen::MatrixXd emp = centered.transpose() * centered / static_cast<double>(mix.pooled.rows() - 1);
    CHECK(emp(0, 1) == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("mixing rejects malformed input")
{
    CHECK_THROWS(mix_components({}, 10, RngStream(1, 1)));
    CHECK_THROWS(mix_components({GaussianDist(0, 1)}, 0, RngStream(1, 1)));
    const DatasetGenerator short_gen = [](std::size_t, std::size_t, RngStream&) -> Dataset {
        return std::vector<double>{1.0};
    };
    const KnownVarModel model{GaussianDist(0.0, 100.0), 4.0};
    CHECK_THROWS(synthesize_and_mix(short_gen, known_variance_analyzer(model), 3, 10, 5, RngStream(1, 1),
                                    RngStream(1, 2)));
}
