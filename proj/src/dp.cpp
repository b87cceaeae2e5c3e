#include "synmix/dp.h"

#include <cmath>
#include <random>

#include "synmix/distributions.h"
#include "synmix/error.h"

namespace synmix {

void PrivacyParams::validate() const
{
    require(epsilon > 0.0 && std::isfinite(epsilon), "PrivacyParams: epsilon must be > 0");
    require(delta > 0.0 && delta < 1.0, "PrivacyParams: delta must lie in (0, 1)");
    require(sensitivity > 0.0 && std::isfinite(sensitivity), "PrivacyParams: sensitivity must be > 0");
}

double PrivateSummary::noise_sd() const { return std::sqrt(noise_variance); }

PrivateSummary gaussian_mechanism(std::span<const double> values, double sigma, RngStream& rng,
                                  std::optional<PrivacyParams> params)
{
    require(sigma > 0.0 && std::isfinite(sigma), "gaussian_mechanism: sigma must be > 0");
    if (params) {
        params->validate();
    }
    std::normal_distribution<double> noise(0.0, sigma);
    PrivateSummary out{std::vector<double>(values.begin(), values.end()), sigma * sigma, params};
    for (auto& v : out.values) {
        v += noise(rng);
    }
    return out;
}

double gaussian_mechanism_delta(double epsilon, double sigma, double sensitivity)
{
    const double a = sensitivity / (2.0 * sigma);
    const double b = epsilon * sigma / sensitivity;
    // e^eps * Phi(-a - b) is formed in log space so large epsilon cannot overflow.
    const double upper = normal_cdf(a - b);
    const double tail = normal_cdf(-a - b);
    const double lower = tail > 0.0 ? std::exp(epsilon + std::log(tail)) : 0.0;
    return upper - lower;
}

double calibrate_sigma(const PrivacyParams& params)
{
    params.validate();
    const auto delta_at = [&](double sigma) {
        return gaussian_mechanism_delta(params.epsilon, sigma, params.sensitivity);
    };
    // delta(sigma) decreases in sigma: bracket [lo, hi] with delta(lo) > target >= delta(hi).
    double lo = params.sensitivity * 1e-3;
    double hi = params.sensitivity;
    int steps = 0;
    while (delta_at(lo) <= params.delta && steps < 200) {
        hi = lo;
        lo *= 0.5;
        ++steps;
    }
    while (delta_at(hi) > params.delta && steps < 200) {
        lo = hi;
        hi *= 2.0;
        ++steps;
    }
    for (; steps < 200; ++steps) {
        if ((hi - lo) <= 1e-9 * hi) {
            return hi;
        }
        const double mid = std::sqrt(lo * hi);
        if (delta_at(mid) <= params.delta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    throw ConvergenceError("calibrate_sigma: bisection did not converge in 200 steps");
}

}  // namespace synmix
