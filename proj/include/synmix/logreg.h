#pragma once

// Bayesian logistic regression with a Gaussian prior, fitted by Newton's
// method to a Laplace approximation.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synmix/maxent.h"
#include "synmix/mixing.h"
#include "synmix/rng.h"

namespace synmix {

/// Rows may carry weights; a weight w row counts as w identical records.
struct LogRegData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd weights;

    static LogRegData unweighted(Eigen::MatrixXd x, Eigen::VectorXd y);
    static LogRegData empty(std::size_t dim);

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
    void validate() const;
};

/// N(mean, variance * I).
struct LogRegPrior {
    Eigen::VectorXd mean;
    double variance = 10.0;

    static LogRegPrior isotropic(std::size_t dim, double variance = 10.0);
    void validate() const;
};

struct LogPosteriorEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/// Up to an additive constant.
LogPosteriorEval log_posterior(const Eigen::VectorXd& beta, const LogRegData& data, const LogRegPrior& prior);
double log_likelihood(const Eigen::VectorXd& beta, const LogRegData& data);

struct LaplacePosterior {
    Eigen::VectorXd mode;
    Eigen::MatrixXd covariance;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Newton ascent with step halving from the prior mean; stops when half the
/// squared Newton decrement is <= tol. Throws ConvergenceError with the last
/// iterates otherwise.
LaplacePosterior laplace_fit(const LogRegData& data, const LogRegPrior& prior, double tol = 1e-10,
                             int max_iter = 100);

/// Two fair-coin 0/1 covariates and y ~ Bernoulli(logistic(coeffs' x)).
LogRegData simulate_toy_data(std::size_t n, const Eigen::Vector2d& coeffs, RngStream& rng);

/// (x1, x2, y) as cells of the three-binary-variable domain.
DiscreteDomain toy_domain();
RecordTable toy_records(const LogRegData& data);

/// Aggregates records into one weighted row per occupied cell. The last
/// variable is the label; the others are 0/1 covariates (values above 1 are
/// used as-is). With `intercept` a leading column of ones is added.
LogRegData records_to_logreg(const RecordTable& records, const DiscreteDomain& domain, bool intercept = false);

/// Same layout from a vector of cell counts.
LogRegData counts_to_logreg(std::span<const std::int64_t> counts, const DiscreteDomain& domain, bool intercept = false);

/// Registered under the name "logreg-laplace"; fits RecordTable data sets.
DownstreamAnalyzer logreg_laplace_analyzer(DiscreteDomain domain, LogRegPrior prior, bool intercept = false);

}  // namespace synmix
