#include "synmix/experiment/analysis.h"

#include <cmath>

#include "synmix/error.h"

namespace synmix::experiment {

RateFit rate_fit(std::span<const double> n, std::span<const double> tv)
{
    require(n.size() == tv.size(), "rate_fit: n and tv differ in length");
    require(n.size() >= 3, "rate_fit: need at least three values of n");
    const std::size_t k = n.size();
    std::vector<double> x(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
        require(n[i] > 0.0, "rate_fit: n must be positive");
        if (!(tv[i] > 0.0)) {
            throw InvalidArgument("rate_fit: TV values must be positive to take logs");
        }
        x[i] = std::log(n[i]);
        y[i] = std::log(tv[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "rate_fit: n values must not all be equal");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += r * r;
    }
    fit.slope_se = k > 2 ? std::sqrt(rss / static_cast<double>(k - 2) / sxx) : 0.0;
    return fit;
}

std::vector<CoverageRow> coverage_width_report(const std::vector<std::vector<std::vector<Interval>>>& intervals,
                                               std::span<const double> truth, std::span<const double> levels)
{
    require(!intervals.empty(), "coverage_width_report: need at least one repetition");
    std::vector<CoverageRow> rows;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        for (std::size_t j = 0; j < truth.size(); ++j) {
            CoverageRow row{levels[l], j, 0.0, 0.0, intervals.size()};
            for (const auto& rep : intervals) {
                require(rep.size() == levels.size() && rep[l].size() == truth.size(),
                        "coverage_width_report: ragged interval array");
                const Interval& iv = rep[l][j];
                row.coverage += iv.contains(truth[j]) ? 1.0 : 0.0;
                row.mean_width += iv.width();
            }
            row.coverage /= static_cast<double>(intervals.size());
            row.mean_width /= static_cast<double>(intervals.size());
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace synmix::experiment
