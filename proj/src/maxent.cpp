#include "synmix/maxent.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "synmix/error.h"

namespace synmix {

DiscreteDomain::DiscreteDomain(std::vector<std::uint32_t> arities) : arities_(std::move(arities))
{
    require(!arities_.empty(), "DiscreteDomain: need at least one variable");
    for (auto a : arities_) {
        require(a >= 1, "DiscreteDomain: arities must be >= 1");
        cells_ *= a;
        require(cells_ <= kMaxDomainCells, "DiscreteDomain: more than 4096 cells is not enumerable here");
    }
}

std::vector<std::uint32_t> DiscreteDomain::decode(std::uint32_t cell) const
{
    require(cell < cells_, "DiscreteDomain::decode: cell out of range");
    std::vector<std::uint32_t> values(arities_.size());
    for (std::size_t v = arities_.size(); v-- > 0;) {
        values[v] = cell % arities_[v];
        cell /= arities_[v];
    }
    return values;
}

std::uint32_t DiscreteDomain::encode(std::span<const std::uint32_t> values) const
{
    require(values.size() == arities_.size(), "DiscreteDomain::encode: wrong number of values");
    std::uint32_t cell = 0;
    for (std::size_t v = 0; v < arities_.size(); ++v) {
        require(values[v] < arities_[v], "DiscreteDomain::encode: value out of range");
        cell = cell * arities_[v] + values[v];
    }
    return cell;
}

QueryModel::QueryModel(DiscreteDomain domain, Eigen::MatrixXd queries, bool pin_last)
    : domain_(std::move(domain)), queries_(std::move(queries)), pin_last_(pin_last)
{
    require(static_cast<std::size_t>(queries_.rows()) == domain_.cells(),
            "QueryModel: query matrix must have one row per cell");
    require(queries_.cols() >= (pin_last_ ? 2 : 1), "QueryModel: too few queries");
    require((queries_.array() == 0.0 || queries_.array() == 1.0).all(), "QueryModel: query matrix must be 0/1");
}

QueryModel QueryModel::full_one_hot(DiscreteDomain domain)
{
    const auto cells = static_cast<Eigen::Index>(domain.cells());
    return QueryModel(std::move(domain), Eigen::MatrixXd::Identity(cells, cells), true);
}

Eigen::VectorXd QueryModel::full_theta(const Eigen::VectorXd& free_theta) const
{
    require(static_cast<std::size_t>(free_theta.size()) == free_dim(), "QueryModel: theta has wrong dimension");
    if (!pin_last_) {
        return free_theta;
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(queries_.cols());
    full.head(free_theta.size()) = free_theta;
    return full;
}

Eigen::VectorXd QueryModel::query_values(const RecordTable& records) const
{
    const auto counts = cell_counts(records, domain_.cells());
    Eigen::VectorXd c(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i) {
        c(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]);
    }
    return queries_.transpose() * c;
}

std::vector<std::int64_t> cell_counts(const RecordTable& records, std::size_t cells)
{
    std::vector<std::int64_t> counts(cells, 0);
    for (auto c : records.cells) {
        require(c < cells, "cell_counts: record outside the domain");
        ++counts[c];
    }
    return counts;
}

Eigen::VectorXd med_cell_probs(const QueryModel& qm, const Eigen::VectorXd& theta)
{
    const Eigen::VectorXd logits = qm.matrix() * qm.full_theta(theta);
    const double top = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - top).exp();
    p /= p.sum();
    return p;
}

QueryMoments med_query_moments(const QueryModel& qm, const Eigen::VectorXd& theta)
{
    const Eigen::VectorXd p = med_cell_probs(qm, theta);
    const Eigen::MatrixXd& a = qm.matrix();
    QueryMoments m;
    m.mean = a.transpose() * p;
    m.covariance = a.transpose() * p.asDiagonal() * a - m.mean * m.mean.transpose();
    return m;
}

double napsu_log_posterior(const QueryModel& qm, std::span<const double> noisy_values, double noise_variance,
                           std::size_t n, double prior_scale, const Eigen::VectorXd& theta, Eigen::VectorXd& grad)
{
    const Eigen::MatrixXd& a = qm.matrix();
    const Eigen::Index q = a.cols();
    require(static_cast<Eigen::Index>(noisy_values.size()) == q, "napsu: noisy summary dimension != query count");
    const double nn = static_cast<double>(n);
    const Eigen::VectorXd p = med_cell_probs(qm, theta);
    const Eigen::VectorXd mu = a.transpose() * p;
    const Eigen::MatrixXd sigma = a.transpose() * p.asDiagonal() * a - mu * mu.transpose();

    Eigen::MatrixXd cov = nn * sigma;
    cov.diagonal().array() += noise_variance + 1e-9;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        grad.setZero(theta.size());
        return -INFINITY;
    }
    const Eigen::Map<const Eigen::VectorXd> s(noisy_values.data(), q);
    const Eigen::VectorXd resid = s - nn * mu;
    const Eigen::VectorXd alpha = llt.solve(resid);
    const Eigen::MatrixXd cov_inv = llt.solve(Eigen::MatrixXd::Identity(q, q));
    const Eigen::MatrixXd l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();

    const double prior_var = prior_scale * prior_scale;
    double value = -0.5 * log_det - 0.5 * resid.dot(alpha) - 0.5 * theta.squaredNorm() / prior_var;

    // d p / d theta_j = p .* (A_j - mu_j); d mu_j = A' w_j;
    // d Sigma_j = A' diag(w_j) A - d mu_j mu' - mu d mu_j'.
    grad.resize(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const Eigen::VectorXd w = p.cwiseProduct(a.col(j).array().matrix() - Eigen::VectorXd::Constant(p.size(), mu(j)));
        const Eigen::VectorXd dmu = a.transpose() * w;
        const Eigen::MatrixXd dsigma =
            a.transpose() * w.asDiagonal() * a - dmu * mu.transpose() - mu * dmu.transpose();
        const double trace_term = (cov_inv.cwiseProduct(dsigma)).sum();
        grad(j) = -0.5 * nn * trace_term + nn * alpha.dot(dmu) + 0.5 * nn * alpha.dot(dsigma * alpha)
                  - theta(j) / prior_var;
    }
    if (!std::isfinite(value)) {
        value = -INFINITY;
    }
    return value;
}

NapsuPosterior napsu_fit(const QueryModel& qm, const PrivateSummary& summary, std::size_t n, const NapsuConfig& config,
                         const RngStream& rng)
{
    require(summary.values.size() == qm.query_count(), "napsu_fit: noisy summary dimension != query count");
    require(n >= 1, "napsu_fit: n must be >= 1");
    require(config.prior_scale > 0.0, "napsu_fit: prior scale must be > 0");
    const std::vector<double> noisy = summary.values;
    const double noise_var = summary.noise_variance;
    const double prior_scale = config.prior_scale;

    const LogDensityFn log_density = [&qm, noisy, noise_var, n, prior_scale](const Eigen::VectorXd& theta,
                                                                               Eigen::VectorXd& grad) {
        return napsu_log_posterior(qm, noisy, noise_var, n, prior_scale, theta, grad);
    };

    // Start near the plug-in log-ratio estimate for a one-hot reference
    // parameterisation; zeros otherwise.
    Eigen::VectorXd center = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(qm.free_dim()));
    if (qm.pins_last()) {
        const double ref = std::log(std::max(noisy.back(), 0.0) + 1.0);
        for (Eigen::Index j = 0; j < center.size(); ++j) {
            center(j) = std::log(std::max(noisy[static_cast<std::size_t>(j)], 0.0) + 1.0) - ref;
        }
        center = center.cwiseMax(-3.0 * prior_scale).cwiseMin(3.0 * prior_scale);
    }
    const double jitter = config.init_jitter;
    const InitFn init = [center, jitter](RngStream& r) {
        std::normal_distribution<double> normal(0.0, jitter);
        Eigen::VectorXd x = center;
        for (auto& v : x) {
            v += normal(r);
        }
        return x;
    };

    HmcResult hmc = run_hmc(log_density, init, config.hmc, rng);
    NapsuPosterior post;
    post.acceptance_rate = hmc.mean_acceptance();
    post.chains = hmc.chains;
    if (post.acceptance_rate < config.min_acceptance) {
        std::ostringstream msg;
        msg << "napsu_fit: HMC acceptance " << post.acceptance_rate << " below " << config.min_acceptance
            << " after warmup; step sizes:";
        for (const auto& c : hmc.chains) {
            msg << ' ' << c.step_size << " (accept " << c.acceptance_rate << ")";
        }
        throw ConvergenceError(msg.str());
    }
    post.theta = std::move(hmc.draws);
    post.chain_id = std::move(hmc.chain_of_draw);
    return post;
}

RecordTable sample_records(const Eigen::VectorXd& cell_probs, std::size_t n, RngStream& rng)
{
    std::discrete_distribution<std::uint32_t> categorical(cell_probs.data(), cell_probs.data() + cell_probs.size());
    RecordTable out;
    out.cells.resize(n);
    for (auto& c : out.cells) {
        c = categorical(rng);
    }
    return out;
}

DatasetGenerator maxent_generator(const NapsuPosterior& posterior, const QueryModel& qm, std::size_t m)
{
    const auto draws = static_cast<std::size_t>(posterior.theta.rows());
    require(m >= 1, "synth_from_posterior: m must be >= 1");
    if (m > draws) {
        throw InvalidArgument("synth_from_posterior: m = " + std::to_string(m) + " exceeds the "
                              + std::to_string(draws) + " posterior draws");
    }
    return [&posterior, &qm, m, draws](std::size_t i, std::size_t count, RngStream& r) -> Dataset {
        const auto row = static_cast<Eigen::Index>(i * draws / m);
        const Eigen::VectorXd theta = posterior.theta.row(row).transpose();
        return sample_records(med_cell_probs(qm, theta), count, r);
    };
}

SyntheticCollection synth_from_posterior(const NapsuPosterior& posterior, const QueryModel& qm, std::size_t m,
                                         std::size_t n_star, const RngStream& rng)
{
    return generate_collection(maxent_generator(posterior, qm, m), "maxent-posterior-predictive", m, n_star, rng);
}

}  // namespace synmix
