#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "synmix/rng.h"

namespace synmix {

/// (epsilon, delta) bound with the L2 sensitivity of the released function.
/// The default sensitivity sqrt(2) is a full one-hot count vector under
/// substitution of one record (one cell -1, another +1).
struct PrivacyParams {
    double epsilon;
    double delta;
    double sensitivity = std::numbers::sqrt2;

    void validate() const;
};

struct PrivateSummary {
    std::vector<double> values;
    double noise_variance;
    std::optional<PrivacyParams> params;

    [[nodiscard]] double noise_sd() const;
};

/// Adds independent N(0, sigma^2) noise to each coordinate.
PrivateSummary gaussian_mechanism(std::span<const double> values, double sigma, RngStream& rng,
                                  std::optional<PrivacyParams> params = std::nullopt);

/// Privacy profile of the Gaussian mechanism:
/// Phi(D/(2s) - e s/D) - e^e Phi(-D/(2s) - e s/D).
double gaussian_mechanism_delta(double epsilon, double sigma, double sensitivity);

/// Smallest sigma with gaussian_mechanism_delta(...) <= delta, by bisection
/// in log-sigma to 1e-9 relative width. Throws ConvergenceError after 200 steps.
double calibrate_sigma(const PrivacyParams& params);

}  // namespace synmix
