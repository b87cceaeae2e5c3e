#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "synmix/dp.h"
#include "synmix/error.h"

using namespace synmix;

TEST_CASE("privacy profile matches a Boost evaluation")
{
    const boost::math::normal z;
    for (double eps : {0.3, 1.0, 4.0}) {
        for (double sigma : {0.5, 2.0, 10.0}) {
            const double d = std::numbers::sqrt2;
            const double want = boost::math::cdf(z, d / (2 * sigma) - eps * sigma / d) -
                                std::exp(eps) * boost::math::cdf(z, -d / (2 * sigma) - eps * sigma / d);
            CHECK(gaussian_mechanism_delta(eps, sigma, d) == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("calibrated sigma is the smallest feasible one")
{
    for (double eps : {0.5, 1.0}) {
        const PrivacyParams p{eps, 2.5e-7};
        const double s = calibrate_sigma(p);
        CHECK(gaussian_mechanism_delta(eps, s, p.sensitivity) <= p.delta * (1 + 1e-9));
        CHECK(gaussian_mechanism_delta(eps, s * (1 - 1e-6), p.sensitivity) > p.delta);
    }
    // Monotone: more privacy, more noise.
    CHECK(calibrate_sigma({0.5, 1e-5}) > calibrate_sigma({1.0, 1e-5}));
    CHECK(calibrate_sigma({1.0, 1e-7}) > calibrate_sigma({1.0, 1e-5}));
}

TEST_CASE("mechanism adds noise of the stated variance")
{
    std::vector<double> v(50000, 3.0);
    RngStream rng(8, 8);
    const auto out = gaussian_mechanism(v, 2.0, rng);
    CHECK(out.noise_variance == 4.0);
    CHECK(out.noise_sd() == 2.0);
    double m = 0.0, s = 0.0;
    for (double x : out.values) {
        m += x;
    }
    m /= out.values.size();
    for (double x : out.values) {
        s += (x - m) * (x - m);
    }
    s /= out.values.size() - 1;
    CHECK(m == doctest::Approx(3.0).epsilon(0.01));
    CHECK(s == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("invalid privacy parameters")
{
    CHECK_THROWS_AS(PrivacyParams({0.0, 1e-5}).validate(), InvalidArgument);
    CHECK_THROWS_AS(PrivacyParams({1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(PrivacyParams({1.0, 0.0}).validate(), InvalidArgument);
    std::vector<double> v = {1.0};
    RngStream rng(1, 1);
    CHECK_THROWS_AS(gaussian_mechanism(v, 0.0, rng), InvalidArgument);
}
