#pragma once

// Hamiltonian Monte Carlo with a diagonal mass matrix, dual-averaging step
// size adaptation and a fixed integration time.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "synmix/rng.h"

namespace synmix {

/// Returns log density at x and writes its gradient into `grad`.
using LogDensityFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct HmcPoint {
    Eigen::VectorXd position;
    double log_density = 0.0;
    Eigen::VectorXd gradient;
};

HmcPoint evaluate_point(const LogDensityFn& log_density, Eigen::VectorXd position);

struct HmcTransition {
    HmcPoint point;
    double accept_prob = 0.0;
    bool accepted = false;
};

/// One Metropolis-corrected leapfrog trajectory. `inv_mass` is the diagonal
/// of the inverse mass matrix (the metric's variance scale).
HmcTransition hmc_transition(const LogDensityFn& log_density, const HmcPoint& current, double step_size,
                             int leapfrog_steps, const Eigen::VectorXd& inv_mass, RngStream& rng);

/// Nesterov dual averaging of log step size (Hoffman & Gelman defaults).
class DualAveraging {
public:
    DualAveraging(double initial_step, double target_accept);

    double update(double accept_prob);
    [[nodiscard]] double final_step() const;
    void restart(double initial_step);

private:
    double target_;
    double mu_ = 0.0;
    double h_bar_ = 0.0;
    double log_step_bar_ = 0.0;
    int iteration_ = 0;
};

struct HmcConfig {
    int chains = 4;
    int warmup = 200;
    int draws = 500;
    double target_accept = 0.8;
    /// Integration time in the mass-scaled metric.
    double path_length = 1.5707963267948966;
    int max_leapfrog_steps = 256;
    double initial_step = 0.1;
    bool adapt_mass = true;
};

struct HmcChainStats {
    double step_size = 0.0;
    double acceptance_rate = 0.0;  // mean accept probability over kept draws
    int leapfrog_steps = 0;
    Eigen::VectorXd inv_mass;
};

struct HmcResult {
    Eigen::MatrixXd draws;       // (chains * draws) x dim, chain-major
    std::vector<int> chain_of_draw;
    std::vector<HmcChainStats> chains;

    [[nodiscard]] double mean_acceptance() const;
};

using InitFn = std::function<Eigen::VectorXd(RngStream&)>;

/// Runs independent chains (chain c uses rng.substream(c)).
HmcResult run_hmc(const LogDensityFn& log_density, const InitFn& init, const HmcConfig& config, const RngStream& rng);

}  // namespace synmix
