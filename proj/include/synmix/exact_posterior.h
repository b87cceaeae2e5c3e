#pragma once

// Metropolis-within-Gibbs sampler for p(s, theta | s~) on an enumerable
// domain: HMC on theta given the counts s (exact multinomial likelihood),
// then Metropolis on s given theta with paired increment/decrement moves.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synmix/dp.h"
#include "synmix/maxent.h"
#include "synmix/mixing.h"
#include "synmix/rng.h"

namespace synmix {

struct CountVector {
    std::vector<std::int64_t> s;
    std::int64_t n = 0;

    /// Throws unless entries are >= 0 and sum to n.
    void validate() const;
    bool operator==(const CountVector&) const = default;
};

struct MwgConfig {
    double hmc_step = 0.05;
    int hmc_leapfrog_steps = 20;
    int count_move_repeats = 30;
    std::size_t total_samples = 20000;  // across chains, warmup included
    int chains = 4;
    double warmup_fraction = 0.2;
    double prior_scale = 10.0;  // theta ~ N(0, prior_scale^2 I)
    double init_sd = 1.0;
    double min_acceptance = 0.05;

    void validate() const;
};

/// Deterministic rounding of real values to non-negative integers summing
/// to n: floor, largest-remainder apportionment, then clamp negatives to 0
/// and take the surplus from the largest entries.
CountVector round_to_counts(std::span<const double> values, std::int64_t n);

struct MwgState {
    Eigen::VectorXd theta;
    CountVector counts;
};

MwgState init_state(const QueryModel& qm, const PrivateSummary& summary, std::int64_t n, double init_sd,
                    RngStream& rng);

/// Candidate after `repeats` independent (+1 at i, -1 at j) pairs with i, j
/// uniform over cells. Entries may go negative; the sum is preserved.
std::vector<std::int64_t> propose_counts(const CountVector& s, int repeats, RngStream& rng);

/// log p(s | theta) + log N(s~; A's, sigma^2 I), up to a constant; -inf for
/// candidates with a negative entry.
double count_log_target(const QueryModel& qm, std::span<const std::int64_t> s, const Eigen::VectorXd& log_probs,
                        std::span<const double> noisy_values, double noise_variance);

/// log p(theta) + log Multinomial(s | p(theta)) with gradient A'(s - n p) - theta / tau^2.
double theta_log_target(const QueryModel& qm, const CountVector& s, double prior_scale, const Eigen::VectorXd& theta,
                        Eigen::VectorXd& grad);

struct MwgChainStats {
    double theta_acceptance = 0.0;
    double count_acceptance = 0.0;
};

struct MwgResult {
    Eigen::MatrixXd theta;  // kept draws x free_dim, chain-major
    std::vector<CountVector> counts;
    std::vector<int> chain_id;
    std::vector<MwgChainStats> chains;
    std::string mass_matrix = "identity";
    double init_sd = 1.0;

    [[nodiscard]] double theta_acceptance() const;
    [[nodiscard]] double count_acceptance() const;
};

/// Throws ConvergenceError when the mean theta-move acceptance over all
/// chains is below cfg.min_acceptance (count moves can be legitimately
/// frozen, e.g. as sigma_DP -> 0).
MwgResult mwg_sample(const QueryModel& qm, const PrivateSummary& summary, std::int64_t n, const MwgConfig& cfg,
                     const RngStream& rng);

/// Record table whose cell counts equal s, in shuffled order.
RecordTable reconstruct_dataset(const CountVector& s, const DiscreteDomain& domain, RngStream& rng);

}  // namespace synmix
