#include "synmix/logreg.h"

#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "synmix/error.h"

namespace synmix {

namespace {

// log(1 + exp(z)) without overflow.
double log1pexp(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

LogRegData LogRegData::unweighted(Eigen::MatrixXd x, Eigen::VectorXd y)
{
    const auto n = x.rows();
    LogRegData d{std::move(x), std::move(y), Eigen::VectorXd::Ones(n)};
    d.validate();
    return d;
}

LogRegData LogRegData::empty(std::size_t dim)
{
    return LogRegData{Eigen::MatrixXd(0, static_cast<Eigen::Index>(dim)), Eigen::VectorXd(0), Eigen::VectorXd(0)};
}

void LogRegData::validate() const
{
    require(x.rows() == y.size() && x.rows() == weights.size(), "LogRegData: design, labels and weights disagree");
    require(x.cols() >= 1, "LogRegData: need at least one coefficient");
    require(((y.array() == 0.0) || (y.array() == 1.0)).all(), "LogRegData: labels must be 0 or 1");
    require((weights.array() >= 0.0).all() && weights.allFinite(), "LogRegData: weights must be finite and >= 0");
    require(x.allFinite(), "LogRegData: design must be finite");
}

LogRegPrior LogRegPrior::isotropic(std::size_t dim, double variance)
{
    LogRegPrior p{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)), variance};
    p.validate();
    return p;
}

void LogRegPrior::validate() const
{
    require(variance > 0.0 && std::isfinite(variance), "LogRegPrior: variance must be positive");
    require(mean.size() >= 1 && mean.allFinite(), "LogRegPrior: mean must be finite and non-empty");
}

double log_likelihood(const Eigen::VectorXd& beta, const LogRegData& data)
{
    require(beta.size() == data.x.cols(), "log_likelihood: beta dimension mismatch");
    const Eigen::VectorXd eta = data.x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += data.weights(i) * (data.y(i) * eta(i) - log1pexp(eta(i)));
    }
    return ll;
}

LogPosteriorEval log_posterior(const Eigen::VectorXd& beta, const LogRegData& data, const LogRegPrior& prior)
{
    require(beta.size() == data.x.cols() && prior.mean.size() == beta.size(), "log_posterior: dimension mismatch");
    const Eigen::VectorXd eta = data.x * beta;
    Eigen::VectorXd resid(eta.size());
    Eigen::VectorXd curv(eta.size());
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double p = logistic(eta(i));
        ll += data.weights(i) * (data.y(i) * eta(i) - log1pexp(eta(i)));
        resid(i) = data.weights(i) * (data.y(i) - p);
        curv(i) = data.weights(i) * p * (1.0 - p);
    }
    const Eigen::VectorXd diff = beta - prior.mean;
    LogPosteriorEval out;
    out.value = ll - 0.5 * diff.squaredNorm() / prior.variance;
    out.gradient = data.x.transpose() * resid - diff / prior.variance;
    out.hessian = -(data.x.transpose() * curv.asDiagonal() * data.x);
    out.hessian.diagonal().array() -= 1.0 / prior.variance;
    out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
    return out;
}

LaplacePosterior laplace_fit(const LogRegData& data, const LogRegPrior& prior, double tol, int max_iter)
{
    data.validate();
    prior.validate();
    require(prior.mean.size() == data.x.cols(), "laplace_fit: prior dimension mismatch");
    require(tol > 0.0 && max_iter >= 1, "laplace_fit: tol and max_iter must be positive");

    Eigen::VectorXd beta = prior.mean;
    LogPosteriorEval cur = log_posterior(beta, data, prior);
    std::deque<std::string> trace;  // last few iterates, for the error message
    for (int it = 0; it <= max_iter; ++it) {
        const auto neg_h = (-cur.hessian).llt();
        require(neg_h.info() == Eigen::Success, "laplace_fit: negative Hessian is not positive definite");
        const Eigen::VectorXd step = neg_h.solve(cur.gradient);
        // Half the squared Newton decrement: the predicted gain of the next
        // step, in log-density units, so the test does not scale with n.
        const double gain = 0.5 * cur.gradient.dot(step);
        std::ostringstream line;
        line << "  iter " << it << ": log post " << cur.value << ", |grad| " << cur.gradient.norm()
             << ", decrement " << gain;
        trace.push_back(line.str());
        if (trace.size() > 8) {
            trace.pop_front();
        }
        if (gain <= tol) {
            // The remaining step is tiny; taking it squares the error.
            beta += step;
            cur = log_posterior(beta, data, prior);
            LaplacePosterior post;
            post.mode = beta;
            post.covariance = (-cur.hessian).llt().solve(Eigen::MatrixXd::Identity(beta.size(), beta.size()));
            post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
            post.iterations = it;
            post.gradient_norm = cur.gradient.norm();
            return post;
        }
        if (it == max_iter) {
            break;
        }
        double scale = 1.0;
        LogPosteriorEval next;
        Eigen::VectorXd cand;
        bool improved = false;
        for (int h = 0; h < 60; ++h) {
            cand = beta + scale * step;
            next = log_posterior(cand, data, prior);
            if (next.value >= cur.value) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            trace.emplace_back("  step-halving failed to improve the objective");
            break;
        }
        beta = cand;
        cur = std::move(next);
    }
    std::string msg = "laplace_fit: Newton decrement did not fall below " + std::to_string(tol);
    for (const auto& l : trace) {
        msg += "\n" + l;
    }
    throw ConvergenceError(msg);
}

LogRegData simulate_toy_data(std::size_t n, const Eigen::Vector2d& coeffs, RngStream& rng)
{
    require(n >= 1, "simulate_toy_data: n must be >= 1");
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = coin(rng) ? 1.0 : 0.0;
        x(i, 1) = coin(rng) ? 1.0 : 0.0;
        y(i) = unif(rng) < logistic(x.row(i).dot(coeffs)) ? 1.0 : 0.0;
    }
    return LogRegData::unweighted(std::move(x), std::move(y));
}

DiscreteDomain toy_domain()
{
    return DiscreteDomain({2, 2, 2});
}

RecordTable toy_records(const LogRegData& data)
{
    require(data.dim() == 2, "toy_records: expected two covariates");
    const DiscreteDomain dom = toy_domain();
    RecordTable out;
    out.cells.reserve(data.rows());
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        require(data.weights(i) == 1.0, "toy_records: weighted rows cannot be expanded");
        const std::uint32_t v[3] = {static_cast<std::uint32_t>(data.x(i, 0)), static_cast<std::uint32_t>(data.x(i, 1)),
                                    static_cast<std::uint32_t>(data.y(i))};
        out.cells.push_back(dom.encode(v));
    }
    return out;
}

LogRegData records_to_logreg(const RecordTable& records, const DiscreteDomain& domain, bool intercept)
{
    return counts_to_logreg(cell_counts(records, domain.cells()), domain, intercept);
}

LogRegData counts_to_logreg(std::span<const std::int64_t> counts, const DiscreteDomain& domain, bool intercept)
{
    require(domain.variables() >= 2, "records_to_logreg: need covariates and a label");
    require(domain.arities().back() == 2, "records_to_logreg: label variable must be binary");
    require(counts.size() == domain.cells(), "records_to_logreg: counts do not match the domain");
    std::size_t occupied = 0;
    for (auto c : counts) {
        require(c >= 0, "records_to_logreg: negative count");
        occupied += c > 0 ? 1 : 0;
    }
    const auto covariates = static_cast<Eigen::Index>(domain.variables() - 1);
    const Eigen::Index offset = intercept ? 1 : 0;
    LogRegData d{Eigen::MatrixXd(static_cast<Eigen::Index>(occupied), covariates + offset),
                 Eigen::VectorXd(static_cast<Eigen::Index>(occupied)),
                 Eigen::VectorXd(static_cast<Eigen::Index>(occupied))};
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            continue;
        }
        const auto v = domain.decode(static_cast<std::uint32_t>(c));
        if (intercept) {
            d.x(row, 0) = 1.0;
        }
        for (Eigen::Index j = 0; j < covariates; ++j) {
            d.x(row, j + offset) = static_cast<double>(v[static_cast<std::size_t>(j)]);
        }
        d.y(row) = static_cast<double>(v.back());
        d.weights(row) = static_cast<double>(counts[c]);
        ++row;
    }
    return d;
}

DownstreamAnalyzer logreg_laplace_analyzer(DiscreteDomain domain, LogRegPrior prior, bool intercept)
{
    prior.validate();
    return DownstreamAnalyzer{
        "logreg-laplace", [domain = std::move(domain), prior = std::move(prior), intercept](const Dataset& data) {
            const auto* records = std::get_if<RecordTable>(&data);
            require(records != nullptr, "logreg-laplace: expects a record table");
            const LaplacePosterior post = laplace_fit(records_to_logreg(*records, domain, intercept), prior);
            return ComponentPosterior{MvGaussian(post.mode, post.covariance)};
        }};
}

}  // namespace synmix
