#pragma once

// Maximum-entropy distribution over a fully enumerable discrete domain,
// p(x) = exp(theta' a(x) - theta0(theta)), with a noise-aware posterior over
// theta given Gaussian-mechanism query releases.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "synmix/dp.h"
#include "synmix/hmc.h"
#include "synmix/mixing.h"
#include "synmix/rng.h"

namespace synmix {

inline constexpr std::size_t kMaxDomainCells = 4096;

/// Cartesian product of categorical variables, enumerated row-major (the
/// last variable changes fastest).
class DiscreteDomain {
public:
    explicit DiscreteDomain(std::vector<std::uint32_t> arities);

    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] std::size_t variables() const noexcept { return arities_.size(); }
    [[nodiscard]] const std::vector<std::uint32_t>& arities() const noexcept { return arities_; }

    [[nodiscard]] std::vector<std::uint32_t> decode(std::uint32_t cell) const;
    [[nodiscard]] std::uint32_t encode(std::span<const std::uint32_t> values) const;

    bool operator==(const DiscreteDomain&) const = default;

private:
    std::vector<std::uint32_t> arities_;
    std::size_t cells_ = 1;
};

/// Marginal-query features a(x) as a cells x queries 0/1 matrix.
///
/// With `pin_last`, the final query's coefficient is fixed at 0 and theta has
/// queries - 1 free entries; this removes the softmax over-parameterisation
/// of a full one-hot query set.
class QueryModel {
public:
    QueryModel(DiscreteDomain domain, Eigen::MatrixXd queries, bool pin_last);

    static QueryModel full_one_hot(DiscreteDomain domain);

    [[nodiscard]] const DiscreteDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return queries_; }
    [[nodiscard]] std::size_t query_count() const noexcept { return static_cast<std::size_t>(queries_.cols()); }
    [[nodiscard]] std::size_t free_dim() const noexcept { return query_count() - (pin_last_ ? 1 : 0); }
    [[nodiscard]] bool pins_last() const noexcept { return pin_last_; }

    [[nodiscard]] Eigen::VectorXd full_theta(const Eigen::VectorXd& free_theta) const;

    /// Query values a(X) summed over the records of a table.
    [[nodiscard]] Eigen::VectorXd query_values(const RecordTable& records) const;

private:
    DiscreteDomain domain_;
    Eigen::MatrixXd queries_;
    bool pin_last_;
};

std::vector<std::int64_t> cell_counts(const RecordTable& records, std::size_t cells);

/// Cell probabilities by log-sum-exp softmax of A theta.
Eigen::VectorXd med_cell_probs(const QueryModel& qm, const Eigen::VectorXd& theta);

struct QueryMoments {
    Eigen::VectorXd mean;        // A' p
    Eigen::MatrixXd covariance;  // A' diag(p) A - mean mean'
};

QueryMoments med_query_moments(const QueryModel& qm, const Eigen::VectorXd& theta);

struct NapsuConfig {
    double prior_scale = 10.0;
    HmcConfig hmc{};
    double min_acceptance = 0.2;
    double init_jitter = 0.1;
};

/// Log posterior of theta (up to a constant) under the Gaussian
/// approximation s~ | theta ~ N(n mu(theta), n Sigma(theta) + sigma_DP^2 I)
/// and prior N(0, prior_scale^2 I). Writes the gradient into `grad`.
double napsu_log_posterior(const QueryModel& qm, std::span<const double> noisy_values, double noise_variance,
                           std::size_t n, double prior_scale, const Eigen::VectorXd& theta, Eigen::VectorXd& grad);

struct NapsuPosterior {
    Eigen::MatrixXd theta;  // draws x free_dim, chain-major
    std::vector<int> chain_id;
    double acceptance_rate = 0.0;
    std::vector<HmcChainStats> chains;
};

NapsuPosterior napsu_fit(const QueryModel& qm, const PrivateSummary& summary, std::size_t n, const NapsuConfig& config,
                         const RngStream& rng);

/// Generator form of synth_from_posterior, for streaming use with
/// synthesize_and_mix. Throws when m exceeds the number of draws.
DatasetGenerator maxent_generator(const NapsuPosterior& posterior, const QueryModel& qm, std::size_t m);

/// Data set i uses theta draw floor(i * draws / m) and n_star i.i.d. records.
SyntheticCollection synth_from_posterior(const NapsuPosterior& posterior, const QueryModel& qm, std::size_t m,
                                         std::size_t n_star, const RngStream& rng);

/// n i.i.d. records from the max-ent distribution at theta.
RecordTable sample_records(const Eigen::VectorXd& cell_probs, std::size_t n, RngStream& rng);

}  // namespace synmix
