#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "synmix/mixing.h"

namespace synmix::experiment {

struct RateFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
};

/// Least-squares slope of log(tv) against log(n). Needs at least three
/// distinct n and strictly positive tv; with exactly-linear input the
/// standard error is 0.
RateFit rate_fit(std::span<const double> n, std::span<const double> tv);

struct CoverageRow {
    double level = 0.0;
    std::size_t coefficient = 0;
    double coverage = 0.0;
    double mean_width = 0.0;
    std::size_t repetitions = 0;
};

/// intervals[rep][level][coefficient]. Infinite intervals count as covering
/// with infinite width.
std::vector<CoverageRow> coverage_width_report(const std::vector<std::vector<std::vector<Interval>>>& intervals,
                                               std::span<const double> truth, std::span<const double> levels);

}  // namespace synmix::experiment
