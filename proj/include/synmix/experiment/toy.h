#pragma once

// DP toy logistic regression: three binary variables, the third drawn from
// a logistic model on the other two, released through the Gaussian
// mechanism as a full one-hot count vector.

#include <Eigen/Dense>

#include <vector>

#include "synmix/dp.h"
#include "synmix/exact_posterior.h"
#include "synmix/experiment/bundle.h"
#include "synmix/experiment/config.h"
#include "synmix/logreg.h"
#include "synmix/maxent.h"
#include "synmix/mixing.h"

namespace synmix::experiment {

struct ToySetup {
    DiscreteDomain domain{{2, 2, 2}};
    QueryModel qm = QueryModel::full_one_hot(DiscreteDomain({2, 2, 2}));
    std::size_t n_x = 2000;
    Eigen::Vector2d coeffs{1.0, 0.0};
    PrivacyParams privacy{1.0, 2.5e-7};
    NapsuConfig napsu{};
    MwgConfig mwg{};
    LogRegPrior prior = LogRegPrior::isotropic(2, 10.0);
    bool intercept = false;
    std::size_t samples_per_dataset = 250;
    std::size_t grid_points = 4096;
    std::size_t target_components = 2000;
};

ToySetup toy_setup(const ExperimentConfig& cfg, double epsilon);

struct ToyRelease {
    LogRegData real;
    RecordTable records;
    std::vector<double> true_counts;
    PrivateSummary noisy;
};

/// Simulates the real data and releases its cell counts with sigma
/// calibrated to (epsilon, delta).
ToyRelease toy_release(const ToySetup& setup, RngStream rng);

NapsuPosterior toy_napsu(const ToySetup& setup, const ToyRelease& release, const RngStream& rng);

/// Mixture of Laplace posteriors over m synthetic data sets of n* records.
MixturePosterior toy_mixture(const ToySetup& setup, const NapsuPosterior& posterior, std::size_t m,
                             std::size_t n_star, const RngStream& rng);

struct ExactTarget {
    MixturePosterior mixture;
    MwgResult chain;
};

/// p(Q | s~) via the exact decomposition: Laplace posteriors of data sets
/// reconstructed from strided Metropolis-within-Gibbs count draws.
ExactTarget toy_exact_target(const ToySetup& setup, const ToyRelease& release, const RngStream& rng);

LaplacePosterior toy_real_posterior(const ToySetup& setup, const ToyRelease& release);

/// Coefficient values the intervals should cover (0 for an intercept).
Eigen::VectorXd toy_truth(const ToySetup& setup);

/// TV between the 1-D marginals of two mixtures, one value per coordinate.
std::vector<double> marginal_tvs(const MixturePosterior& a, const MixturePosterior& b, std::size_t grid_points);

ResultBundle run_toy_dp_logreg(const ExperimentConfig& cfg);
ResultBundle run_toy_sweep(const ExperimentConfig& cfg);
ResultBundle run_coverage_study(const ExperimentConfig& cfg);

}  // namespace synmix::experiment
