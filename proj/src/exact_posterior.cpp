#include "synmix/exact_posterior.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "synmix/error.h"
#include "synmix/hmc.h"
#include "synmix/parallel.h"

namespace synmix {

void CountVector::validate() const
{
    std::int64_t total = 0;
    for (auto v : s) {
        require(v >= 0, "CountVector: negative entry");
        total += v;
    }
    require(total == n, "CountVector: entries do not sum to n");
}

void MwgConfig::validate() const
{
    require(hmc_step > 0.0 && hmc_leapfrog_steps > 0 && count_move_repeats > 0 && chains > 0,
            "MwgConfig: step, leapfrog steps, repeats and chains must be positive");
    require(warmup_fraction > 0.0 && warmup_fraction < 1.0, "MwgConfig: warmup fraction must be in (0,1)");
    require(prior_scale > 0.0 && init_sd > 0.0, "MwgConfig: prior scale and init sd must be positive");
    require(total_samples / static_cast<std::size_t>(chains) >= 2, "MwgConfig: too few samples per chain");
}

CountVector round_to_counts(std::span<const double> values, std::int64_t n)
{
    require(!values.empty(), "round_to_counts: empty input");
    require(n >= 0, "round_to_counts: n must be >= 0");
    const std::size_t k = values.size();
    std::vector<std::int64_t> out(k);
    std::vector<double> rem(k);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        require(std::isfinite(values[i]), "round_to_counts: non-finite value");
        const double f = std::floor(values[i]);
        out[i] = static_cast<std::int64_t>(f);
        rem[i] = values[i] - f;
        total += out[i];
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::int64_t deficit = n - total;
    if (deficit > 0) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
        for (std::int64_t d = 0; d < deficit; ++d) {
            ++out[order[static_cast<std::size_t>(d) % k]];
        }
    } else if (deficit < 0) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] < rem[b]; });
        for (std::int64_t d = 0; d < -deficit; ++d) {
            --out[order[static_cast<std::size_t>(d) % k]];
        }
    }

    std::int64_t surplus = 0;
    for (auto& v : out) {
        if (v < 0) {
            surplus += -v;
            v = 0;
        }
    }
    while (surplus > 0) {
        auto largest = std::max_element(out.begin(), out.end());
        --*largest;
        --surplus;
    }
    CountVector cv{std::move(out), n};
    cv.validate();
    return cv;
}

MwgState init_state(const QueryModel& qm, const PrivateSummary& summary, std::int64_t n, double init_sd,
                    RngStream& rng)
{
    require(n >= 1, "init_state: n must be >= 1");
    for (double v : summary.values) {
        require(std::isfinite(v), "init_state: noisy summary must be finite");
    }
    MwgState st;
    st.theta.resize(static_cast<Eigen::Index>(qm.free_dim()));
    std::normal_distribution<double> normal(0.0, init_sd);
    for (auto& v : st.theta) {
        v = normal(rng);
    }
    if (summary.values.size() == qm.domain().cells()) {
        st.counts = round_to_counts(summary.values, n);
    } else {
        // Summary lives in a coarser query space; start from an even split.
        const std::vector<double> even(qm.domain().cells(), static_cast<double>(n) / qm.domain().cells());
        st.counts = round_to_counts(even, n);
    }
    return st;
}

std::vector<std::int64_t> propose_counts(const CountVector& s, int repeats, RngStream& rng)
{
    require(repeats >= 1, "propose_counts: repeats must be >= 1");
    std::vector<std::int64_t> cand = s.s;
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    for (int r = 0; r < repeats; ++r) {
        const auto up = pick(rng);
        const auto down = pick(rng);
        ++cand[up];
        --cand[down];
    }
    return cand;
}

double count_log_target(const QueryModel& qm, std::span<const std::int64_t> s, const Eigen::VectorXd& log_probs,
                        std::span<const double> noisy_values, double noise_variance)
{
    const Eigen::MatrixXd& a = qm.matrix();
    double lp = 0.0;
    Eigen::VectorXd counts(a.rows());
    for (Eigen::Index c = 0; c < a.rows(); ++c) {
        const auto v = s[static_cast<std::size_t>(c)];
        if (v < 0) {
            return -INFINITY;
        }
        counts(c) = static_cast<double>(v);
        if (v > 0) {
            lp += static_cast<double>(v) * log_probs(c) - std::lgamma(static_cast<double>(v) + 1.0);
        }
    }
    const Eigen::Map<const Eigen::VectorXd> noisy(noisy_values.data(), a.cols());
    const Eigen::VectorXd resid = noisy - a.transpose() * counts;
    return lp - 0.5 * resid.squaredNorm() / noise_variance;
}

double theta_log_target(const QueryModel& qm, const CountVector& s, double prior_scale, const Eigen::VectorXd& theta,
                        Eigen::VectorXd& grad)
{
    const Eigen::MatrixXd& a = qm.matrix();
    const Eigen::VectorXd logits = a * qm.full_theta(theta);
    const double top = logits.maxCoeff();
    const double log_z = top + std::log((logits.array() - top).exp().sum());
    const Eigen::VectorXd p = (logits.array() - log_z).exp();

    Eigen::VectorXd counts(a.rows());
    for (Eigen::Index c = 0; c < a.rows(); ++c) {
        counts(c) = static_cast<double>(s.s[static_cast<std::size_t>(c)]);
    }
    const double nn = static_cast<double>(s.n);
    const double tau2 = prior_scale * prior_scale;
    const double value = counts.dot(logits) - nn * log_z - 0.5 * theta.squaredNorm() / tau2;
    const Eigen::VectorXd full_grad = a.transpose() * (counts - nn * p);
    grad = full_grad.head(theta.size()) - theta / tau2;
    return value;
}

double MwgResult::theta_acceptance() const
{
    double acc = 0.0;
    for (const auto& c : chains) {
        acc += c.theta_acceptance;
    }
    return chains.empty() ? 0.0 : acc / static_cast<double>(chains.size());
}

double MwgResult::count_acceptance() const
{
    double acc = 0.0;
    for (const auto& c : chains) {
        acc += c.count_acceptance;
    }
    return chains.empty() ? 0.0 : acc / static_cast<double>(chains.size());
}

namespace {

struct ChainOutput {
    std::vector<Eigen::VectorXd> theta;
    std::vector<CountVector> counts;
    MwgChainStats stats;
};

ChainOutput run_chain(const QueryModel& qm, const PrivateSummary& summary, std::int64_t n, const MwgConfig& cfg,
                      std::size_t iterations, std::size_t warmup, RngStream rng)
{
    MwgState st = init_state(qm, summary, n, cfg.init_sd, rng);
    const Eigen::VectorXd inv_mass = Eigen::VectorXd::Ones(st.theta.size());
    const double noise_var = summary.noise_variance;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    ChainOutput out;
    out.theta.reserve(iterations - warmup);
    out.counts.reserve(iterations - warmup);
    double theta_acc = 0.0;
    std::size_t count_acc = 0;

    for (std::size_t it = 0; it < iterations; ++it) {
        const CountVector& s = st.counts;
        const LogDensityFn logd = [&qm, &s, &cfg](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
            return theta_log_target(qm, s, cfg.prior_scale, x, g);
        };
        const HmcPoint current = evaluate_point(logd, st.theta);
        const HmcTransition tr = hmc_transition(logd, current, cfg.hmc_step, cfg.hmc_leapfrog_steps, inv_mass, rng);
        st.theta = tr.point.position;

        const Eigen::VectorXd logits = qm.matrix() * qm.full_theta(st.theta);
        const double top = logits.maxCoeff();
        const Eigen::VectorXd log_probs = logits.array() - (top + std::log((logits.array() - top).exp().sum()));
        const auto cand = propose_counts(st.counts, cfg.count_move_repeats, rng);
        bool accepted = false;
        if (std::all_of(cand.begin(), cand.end(), [](auto v) { return v >= 0; })) {
            const double lp_new = count_log_target(qm, cand, log_probs, summary.values, noise_var);
            const double lp_old = count_log_target(qm, st.counts.s, log_probs, summary.values, noise_var);
            if (std::log(unif(rng)) < lp_new - lp_old) {
                st.counts.s = cand;
                accepted = true;
            }
        }

        if (it >= warmup) {
            theta_acc += tr.accept_prob;
            count_acc += accepted ? 1 : 0;
            out.theta.push_back(st.theta);
            out.counts.push_back(st.counts);
        }
    }
    const double kept = static_cast<double>(iterations - warmup);
    out.stats.theta_acceptance = theta_acc / kept;
    out.stats.count_acceptance = static_cast<double>(count_acc) / kept;
    return out;
}

}  // namespace

MwgResult mwg_sample(const QueryModel& qm, const PrivateSummary& summary, std::int64_t n, const MwgConfig& cfg,
                     const RngStream& rng)
{
    cfg.validate();
    require(summary.values.size() == qm.query_count(), "mwg_sample: noisy summary dimension != query count");
    require(summary.noise_variance > 0.0, "mwg_sample: noise variance must be positive");
    const auto chains = static_cast<std::size_t>(cfg.chains);
    const std::size_t per_chain = cfg.total_samples / chains;
    const auto warmup = static_cast<std::size_t>(std::floor(cfg.warmup_fraction * static_cast<double>(per_chain)));
    require(warmup < per_chain, "mwg_sample: warmup leaves no kept draws");

    std::vector<ChainOutput> outs(chains);
    parallel_for(chains, [&](std::size_t c) {
        outs[c] = run_chain(qm, summary, n, cfg, per_chain, warmup, rng.substream(c));
    });

    MwgResult res;
    res.init_sd = cfg.init_sd;
    const std::size_t kept = per_chain - warmup;
    res.theta.resize(static_cast<Eigen::Index>(kept * chains), static_cast<Eigen::Index>(qm.free_dim()));
    res.counts.reserve(kept * chains);
    res.chain_id.reserve(kept * chains);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < chains; ++c) {
        for (std::size_t i = 0; i < kept; ++i) {
            res.theta.row(row++) = outs[c].theta[i].transpose();
            res.counts.push_back(std::move(outs[c].counts[i]));
            res.chain_id.push_back(static_cast<int>(c));
        }
        res.chains.push_back(outs[c].stats);
    }
    if (res.theta_acceptance() < cfg.min_acceptance) {
        std::ostringstream msg;
        msg << "mwg_sample: theta acceptance " << res.theta_acceptance() << " below " << cfg.min_acceptance
            << " (count acceptance " << res.count_acceptance() << "); per chain:";
        for (const auto& s : res.chains) {
            msg << " [" << s.theta_acceptance << ", " << s.count_acceptance << "]";
        }
        throw ConvergenceError(msg.str());
    }
    return res;
}

RecordTable reconstruct_dataset(const CountVector& s, const DiscreteDomain& domain, RngStream& rng)
{
    s.validate();
    require(s.s.size() == domain.cells(), "reconstruct_dataset: count vector does not match the domain");
    RecordTable out;
    out.cells.reserve(static_cast<std::size_t>(s.n));
    for (std::size_t c = 0; c < s.s.size(); ++c) {
        out.cells.insert(out.cells.end(), static_cast<std::size_t>(s.s[c]), static_cast<std::uint32_t>(c));
    }
    std::shuffle(out.cells.begin(), out.cells.end(), rng);
    return out;
}

}  // namespace synmix
