#include "synmix/hmc.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "synmix/error.h"
#include "synmix/parallel.h"

namespace synmix {

HmcPoint evaluate_point(const LogDensityFn& log_density, Eigen::VectorXd position)
{
    HmcPoint p;
    p.gradient.resize(position.size());
    p.log_density = log_density(position, p.gradient);
    p.position = std::move(position);
    return p;
}

HmcTransition hmc_transition(const LogDensityFn& log_density, const HmcPoint& current, double step_size,
                             int leapfrog_steps, const Eigen::VectorXd& inv_mass, RngStream& rng)
{
    const Eigen::Index dim = current.position.size();
    std::normal_distribution<double> normal;
    Eigen::VectorXd momentum(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        momentum(i) = normal(rng) / std::sqrt(inv_mass(i));
    }
    const double kinetic0 = 0.5 * momentum.dot(inv_mass.cwiseProduct(momentum));

    Eigen::VectorXd x = current.position;
    Eigen::VectorXd grad = current.gradient;
    double logp = current.log_density;
    momentum += 0.5 * step_size * grad;
    for (int s = 0; s < leapfrog_steps; ++s) {
        x += step_size * inv_mass.cwiseProduct(momentum);
        logp = log_density(x, grad);
        if (!std::isfinite(logp)) {
            break;
        }
        if (s + 1 < leapfrog_steps) {
            momentum += step_size * grad;
        }
    }
    HmcTransition out;
    if (std::isfinite(logp)) {
        momentum += 0.5 * step_size * grad;
        const double kinetic1 = 0.5 * momentum.dot(inv_mass.cwiseProduct(momentum));
        const double log_ratio = (logp - kinetic1) - (current.log_density - kinetic0);
        out.accept_prob = std::isfinite(log_ratio) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
    }
    if (out.accept_prob > 0.0 && rng.uniform() < out.accept_prob) {
        out.point = HmcPoint{std::move(x), logp, std::move(grad)};
        out.accepted = true;
    } else {
        out.point = current;
    }
    return out;
}

DualAveraging::DualAveraging(double initial_step, double target_accept) : target_(target_accept)
{
    restart(initial_step);
}

void DualAveraging::restart(double initial_step)
{
    mu_ = std::log(10.0 * initial_step);
    h_bar_ = 0.0;
    log_step_bar_ = std::log(initial_step);
    iteration_ = 0;
}

double DualAveraging::update(double accept_prob)
{
    constexpr double kGamma = 0.05;
    constexpr double kT0 = 10.0;
    constexpr double kKappa = 0.75;
    ++iteration_;
    const double t = iteration_;
    const double eta = 1.0 / (t + kT0);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept_prob);
    const double log_step = mu_ - std::sqrt(t) / kGamma * h_bar_;
    const double w = std::pow(t, -kKappa);
    log_step_bar_ = w * log_step + (1.0 - w) * log_step_bar_;
    return std::exp(log_step);
}

double DualAveraging::final_step() const { return std::exp(log_step_bar_); }

double HmcResult::mean_acceptance() const
{
    if (chains.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& c : chains) {
        total += c.acceptance_rate;
    }
    return total / static_cast<double>(chains.size());
}

namespace {

int steps_for(double path_length, double step, int max_steps)
{
    return std::clamp(static_cast<int>(std::ceil(path_length / step)), 1, max_steps);
}

struct ChainOutput {
    Eigen::MatrixXd draws;
    HmcChainStats stats;
};

ChainOutput run_chain(const LogDensityFn& log_density, const InitFn& init, const HmcConfig& cfg, RngStream rng)
{
    HmcPoint point = evaluate_point(log_density, init(rng));
    require(std::isfinite(point.log_density), "run_hmc: initial point has non-finite log density");
    const Eigen::Index dim = point.position.size();
    Eigen::VectorXd inv_mass = Eigen::VectorXd::Ones(dim);
    double step = cfg.initial_step;
    DualAveraging adapt(step, cfg.target_accept);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);

    // Warmup: step-size only, then a window that estimates the diagonal
    // metric, then step-size only again with the new metric.
    const int window_start = cfg.warmup * 15 / 100;
    const int window_end = cfg.warmup * 85 / 100;
    std::vector<Eigen::VectorXd> window;
    for (int it = 0; it < cfg.warmup; ++it) {
        const double eps = step * jitter(rng);
        auto tr = hmc_transition(log_density, point, eps, steps_for(cfg.path_length, eps, cfg.max_leapfrog_steps),
                                 inv_mass, rng);
        point = std::move(tr.point);
        step = adapt.update(tr.accept_prob);
        if (cfg.adapt_mass && it >= window_start && it < window_end) {
            window.push_back(point.position);
        }
        if (cfg.adapt_mass && it + 1 == window_end && window.size() >= 10) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
            for (const auto& w : window) {
                mean += w;
            }
            mean /= static_cast<double>(window.size());
            Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
            for (const auto& w : window) {
                var += (w - mean).cwiseAbs2();
            }
            const double n = static_cast<double>(window.size());
            var /= (n - 1.0);
            // Shrink toward a small constant, as in Stan's windowed adaptation.
            inv_mass = (n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0));
            step = adapt.final_step();
            adapt.restart(step);
        }
    }
    if (cfg.warmup > 0) {
        step = adapt.final_step();
    }

    ChainOutput out;
    out.draws.resize(cfg.draws, dim);
    const int steps = steps_for(cfg.path_length, step, cfg.max_leapfrog_steps);
    double accept_total = 0.0;
    for (int it = 0; it < cfg.draws; ++it) {
        const double eps = step * jitter(rng);
        auto tr = hmc_transition(log_density, point, eps, steps_for(cfg.path_length, eps, cfg.max_leapfrog_steps),
                                 inv_mass, rng);
        accept_total += tr.accept_prob;
        point = std::move(tr.point);
        out.draws.row(it) = point.position.transpose();
    }
    out.stats.step_size = step;
    out.stats.leapfrog_steps = steps;
    out.stats.acceptance_rate = cfg.draws > 0 ? accept_total / cfg.draws : 0.0;
    out.stats.inv_mass = inv_mass;
    return out;
}

}  // namespace

HmcResult run_hmc(const LogDensityFn& log_density, const InitFn& init, const HmcConfig& config, const RngStream& rng)
{
    require(config.chains >= 1 && config.draws >= 1 && config.warmup >= 0, "run_hmc: invalid chain configuration");
    require(config.initial_step > 0.0 && config.path_length > 0.0, "run_hmc: step and path length must be > 0");
    std::vector<ChainOutput> chains(static_cast<std::size_t>(config.chains));
    parallel_for(chains.size(), [&](std::size_t c) {
        chains[c] = run_chain(log_density, init, config, rng.substream(c));
    });
    HmcResult result;
    const Eigen::Index dim = chains.front().draws.cols();
    result.draws.resize(static_cast<Eigen::Index>(config.chains) * config.draws, dim);
    for (std::size_t c = 0; c < chains.size(); ++c) {
        result.draws.middleRows(static_cast<Eigen::Index>(c) * config.draws, config.draws) = chains[c].draws;
        result.chain_of_draw.insert(result.chain_of_draw.end(), static_cast<std::size_t>(config.draws),
                                    static_cast<int>(c));
        result.chains.push_back(chains[c].stats);
    }
    return result;
}

}  // namespace synmix
