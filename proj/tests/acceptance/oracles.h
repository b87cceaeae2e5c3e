#pragma once

// Reference computations for the acceptance checks. Written against
// Eigen/Boost/std only, so they do not share code paths with the library.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace synmix::oracle {

/// All non-negative integer vectors of length `cells` summing to n, in
/// lexicographic order.
std::vector<std::vector<std::int64_t>> compositions(int n, int cells);

/// p(s | s~) on a one-hot max-ent model with theta ~ N(0, tau^2 I) on all
/// but the last cell (pinned to 0) and s~ = s + N(0, sigma^2 I):
/// the prior predictive p(s) is a Monte Carlo average of multinomial pmfs
/// over `draws` prior samples; the rest is exact enumeration.
std::map<std::vector<std::int64_t>, double> count_posterior(const std::vector<double>& noisy, double noise_variance,
                                                            int n, double tau, std::size_t draws, std::uint64_t seed);

/// Normal posterior for a mean with known variance: (mean, variance).
std::pair<double, double> known_variance_posterior(double prior_mean, double prior_var, double known_var,
                                                   const std::vector<double>& x);

/// Central finite-difference gradient.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h = 1e-5);

/// Gaussian-mechanism privacy profile via Boost's normal CDF.
double gaussian_delta(double epsilon, double sigma, double sensitivity);

}  // namespace synmix::oracle
