#include "oracles.h"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <random>

namespace synmix::oracle {

namespace {

void compose(int left, int cell, int cells, std::vector<std::int64_t>& cur,
             std::vector<std::vector<std::int64_t>>& out)
{
    if (cell == cells - 1) {
        cur[static_cast<std::size_t>(cell)] = left;
        out.push_back(cur);
        return;
    }
    for (int v = left; v >= 0; --v) {
        cur[static_cast<std::size_t>(cell)] = v;
        compose(left - v, cell + 1, cells, cur, out);
    }
}

}  // namespace

std::vector<std::vector<std::int64_t>> compositions(int n, int cells)
{
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> cur(static_cast<std::size_t>(cells));
    compose(n, 0, cells, cur, out);
    return out;
}

std::map<std::vector<std::int64_t>, double> count_posterior(const std::vector<double>& noisy, double noise_variance,
                                                            int n, double tau, std::size_t draws, std::uint64_t seed)
{
    const int cells = static_cast<int>(noisy.size());
    const auto all = compositions(n, cells);
    const auto k = static_cast<Eigen::Index>(all.size());
    Eigen::MatrixXd s(k, cells);
    Eigen::VectorXd log_coef(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double lc = std::lgamma(n + 1.0);
        for (int c = 0; c < cells; ++c) {
            s(i, c) = static_cast<double>(all[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
            lc -= std::lgamma(s(i, c) + 1.0);
        }
        log_coef(i) = lc;
    }

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, tau);
    Eigen::VectorXd prior_pred = Eigen::VectorXd::Zero(k);
    constexpr Eigen::Index batch = 4096;
    Eigen::MatrixXd logp(cells, batch);
    std::size_t done = 0;
    while (done < draws) {
        const auto b = static_cast<Eigen::Index>(std::min<std::size_t>(batch, draws - done));
        for (Eigen::Index j = 0; j < b; ++j) {
            Eigen::VectorXd theta(cells);
            for (int c = 0; c < cells - 1; ++c) {
                theta(c) = normal(gen);
            }
            theta(cells - 1) = 0.0;
            const double top = theta.maxCoeff();
            const double lse = top + std::log((theta.array() - top).exp().sum());
            logp.col(j) = theta.array() - lse;
        }
        const Eigen::MatrixXd ll = s * logp.leftCols(b);
        prior_pred += (ll.colwise() + log_coef).array().exp().matrix().rowwise().sum();
        done += static_cast<std::size_t>(b);
    }
    prior_pred /= static_cast<double>(draws);

    std::map<std::vector<std::int64_t>, double> post;
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        double sq = 0.0;
        for (int c = 0; c < cells; ++c) {
            const double d = noisy[static_cast<std::size_t>(c)] - s(i, c);
            sq += d * d;
        }
        const double w = prior_pred(i) * std::exp(-0.5 * sq / noise_variance);
        post[all[static_cast<std::size_t>(i)]] = w;
        total += w;
    }
    for (auto& [key, v] : post) {
        v /= total;
    }
    return post;
}

std::pair<double, double> known_variance_posterior(double prior_mean, double prior_var, double known_var,
                                                   const std::vector<double>& x)
{
    double sum = 0.0;
    for (double v : x) {
        sum += v;
    }
    const double precision = 1.0 / prior_var + static_cast<double>(x.size()) / known_var;
    const double mean = (prior_mean / prior_var + sum / known_var) / precision;
    return {mean, 1.0 / precision};
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi(i) += h;
        lo(i) -= h;
        g(i) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

double gaussian_delta(double epsilon, double sigma, double sensitivity)
{
    const boost::math::normal std_normal;
    const double a = sensitivity / (2.0 * sigma);
    const double b = epsilon * sigma / sensitivity;
    return boost::math::cdf(std_normal, a - b) - std::exp(epsilon) * boost::math::cdf(std_normal, -a - b);
}

}  // namespace synmix::oracle
