#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "synmix/distributions.h"

namespace synmix {

inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr double kGridHalfWidthSds = 8.0;

/// Density values tabulated on a strictly increasing grid.
class GridDensity {
public:
    GridDensity(std::vector<double> grid, std::vector<double> values);

    static GridDensity tabulate(std::vector<double> grid, const std::function<double(double)>& density);

    [[nodiscard]] std::span<const double> grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }

    /// Trapezoid integral of the values over the grid.
    [[nodiscard]] double integral() const noexcept;
    [[nodiscard]] bool normalized(double tolerance = 1e-3) const noexcept;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

std::vector<double> linspace(double lo, double hi, std::size_t points);

/// Grid convention for 1-D distance estimates: 4096 points spanning the
/// smallest to largest mean, padded by 8 of the widest standard deviation.
std::vector<double> covering_grid(std::span<const GaussianDist> dists, std::size_t points = kDefaultGridPoints);

/// Half the L1 distance between two tabulated densities, clamped to [0, 1].
/// Throws InvalidArgument when the grids differ.
double tv_distance_grid(const GridDensity& p, const GridDensity& q);

/// Closed-form KL(p || q) between univariate normals.
double kl_gaussian(const GaussianDist& p, const GaussianDist& q) noexcept;

}  // namespace synmix
