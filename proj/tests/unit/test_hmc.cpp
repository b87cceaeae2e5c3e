#include <doctest.h>

#include <Eigen/Dense>

#include "synmix/hmc.h"

using namespace synmix;

TEST_CASE("hmc recovers a correlated gaussian")
{
    Eigen::Matrix2d cov;
    cov << 4.0, 1.2, 1.2, 1.0;
    const Eigen::Matrix2d prec = cov.inverse();
    const Eigen::Vector2d mu(1.0, -2.0);
    const LogDensityFn logd = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const Eigen::VectorXd d = x - mu;
        g = -prec * d;
        return -0.5 * d.dot(prec * d);
    };
    HmcConfig cfg;
    cfg.chains = 2;
    cfg.warmup = 500;
    cfg.draws = 3000;
    const auto res = run_hmc(
        logd, [](RngStream&) { return Eigen::VectorXd::Zero(2).eval(); }, cfg, RngStream(12, 0));
    REQUIRE(res.draws.rows() == 6000);
    const Eigen::VectorXd mean = res.draws.colwise().mean();
    const Eigen::MatrixXd c = res.draws.rowwise() - mean.transpose();
    const Eigen::MatrixXd emp = c.transpose() * c / 5999.0;
    CHECK(mean(0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(mean(1) == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(emp(0, 0) == doctest::Approx(4.0).epsilon(0.15));
    CHECK(emp(1, 1) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(emp(0, 1) == doctest::Approx(1.2).epsilon(0.2));
    CHECK(res.mean_acceptance() > 0.6);
    for (const auto& ch : res.chains) {
        CHECK(ch.step_size > 0.0);
        CHECK(ch.inv_mass.size() == 2);
    }
}

TEST_CASE("chains are reproducible from the stream")
{
    const LogDensityFn logd = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = -x;
        return -0.5 * x.squaredNorm();
    };
    HmcConfig cfg;
    cfg.chains = 2;
    cfg.warmup = 50;
    cfg.draws = 50;
    const auto init = [](RngStream&) { return Eigen::VectorXd::Ones(3).eval(); };
    const auto a = run_hmc(logd, init, cfg, RngStream(3, 0));
    const auto b = run_hmc(logd, init, cfg, RngStream(3, 0));
    CHECK(a.draws == b.draws);
}

TEST_CASE("dual averaging moves the step toward the target acceptance")
{
    DualAveraging da(1.0, 0.8);
    double step = 1.0;
    for (int i = 0; i < 50; ++i) {
        step = da.update(0.1);  // too large a step: should shrink
    }
    CHECK(step < 1.0);
    DualAveraging up(0.01, 0.8);
    for (int i = 0; i < 50; ++i) {
        step = up.update(1.0);
    }
    CHECK(step > 0.01);
}

TEST_CASE("a leapfrog transition on a flat direction conserves position drift")
{
    const LogDensityFn logd = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = -x;
        return -0.5 * x.squaredNorm();
    };
    RngStream rng(1, 1);
    const auto start = evaluate_point(logd, Eigen::VectorXd::Zero(2));
    const auto t = hmc_transition(logd, start, 0.1, 10, Eigen::VectorXd::Ones(2), rng);
    // Energy error of leapfrog on a quadratic with h = 0.1 is tiny.
    CHECK(t.accept_prob > 0.99);
}
