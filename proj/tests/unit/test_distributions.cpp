#include <doctest.h>

#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numeric>

#include "synmix/distributions.h"
#include "synmix/error.h"
#include "synmix/rng.h"

using namespace synmix;

TEST_CASE("normal pdf and cdf match Boost")
{
    const boost::math::normal ref(1.5, 2.0);
    const GaussianDist d(1.5, 4.0);
    for (double x : {-7.0, -1.0, 0.0, 1.5, 3.3, 12.0}) {
        CHECK(d.pdf(x) == doctest::Approx(boost::math::pdf(ref, x)).epsilon(1e-12));
        CHECK(d.cdf(x) == doctest::Approx(boost::math::cdf(ref, x)).epsilon(1e-12));
        CHECK(d.log_pdf(x) == doctest::Approx(std::log(boost::math::pdf(ref, x))).epsilon(1e-12));
    }
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("scaled inverse chi-squared is an inverse gamma")
{
    const double nu = 7.0, s2 = 2.5;
    const boost::math::inverse_gamma ref(nu / 2.0, nu * s2 / 2.0);
    const ScaledInvChiSq d(nu, s2);
    for (double x : {0.1, 0.7, 2.5, 9.0}) {
        CHECK(d.pdf(x) == doctest::Approx(boost::math::pdf(ref, x)).epsilon(1e-12));
    }
    CHECK(*d.mean() == doctest::Approx(boost::math::mean(ref)));
    CHECK(*d.variance() == doctest::Approx(boost::math::variance(ref)));
    CHECK(!ScaledInvChiSq(2.0, 1.0).mean().has_value());
    CHECK(!ScaledInvChiSq(4.0, 1.0).variance().has_value());
    CHECK(d.pdf(-1.0) == 0.0);
}

TEST_CASE("location-scale t matches Boost")
{
    const boost::math::students_t ref(5.0);
    const StudentT d(5.0, 2.0, 0.25);
    for (double x : {-1.0, 1.5, 2.0, 4.0}) {
        const double z = (x - 2.0) / 0.5;
        CHECK(d.pdf(x) == doctest::Approx(boost::math::pdf(ref, z) / 0.5).epsilon(1e-12));
    }
    CHECK(*d.variance() == doctest::Approx(0.25 * 5.0 / 3.0));
    CHECK(!StudentT(2.0, 0.0, 1.0).variance().has_value());
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(GaussianDist(0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(GaussianDist(0.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(ScaledInvChiSq(0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(StudentT(1.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("sampler moments")
{
    RngStream rng(5, 1);
    const auto g = sample_gaussian(GaussianDist(-2.0, 9.0), 200000, rng);
    const double gm = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
    double gv = 0.0;
    for (double x : g) {
        gv += (x - gm) * (x - gm);
    }
    gv /= g.size() - 1;
    CHECK(gm == doctest::Approx(-2.0).epsilon(0.02));
    CHECK(gv == doctest::Approx(9.0).epsilon(0.02));

    const ScaledInvChiSq ic(12.0, 3.0);
    const auto v = sample_scaled_inv_chi2(ic, 200000, rng);
    const double vm = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    CHECK(vm == doctest::Approx(*ic.mean()).epsilon(0.01));
    CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; }));
}
