#include "synmix/grid.h"

#include <algorithm>
#include <cmath>

#include "synmix/error.h"
#include "synmix/kernels.h"

namespace synmix {

GridDensity::GridDensity(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    require(grid_.size() >= 2, "GridDensity: need at least two grid points");
    require(grid_.size() == values_.size(), "GridDensity: grid and values differ in length");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        require(grid_[i] < grid_[i + 1], "GridDensity: grid must be strictly increasing");
    }
    for (double v : values_) {
        require(v >= 0.0 && std::isfinite(v), "GridDensity: values must be finite and non-negative");
    }
}

GridDensity GridDensity::tabulate(std::vector<double> grid, const std::function<double(double)>& density)
{
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), density);
    return GridDensity(std::move(grid), std::move(values));
}

double GridDensity::integral() const noexcept { return kernels::trapezoid(grid_, values_); }

bool GridDensity::normalized(double tolerance) const noexcept { return std::abs(integral() - 1.0) <= tolerance; }

std::vector<double> linspace(double lo, double hi, std::size_t points)
{
    require(points >= 2, "linspace: need at least two points");
    require(lo < hi, "linspace: lo must be below hi");
    std::vector<double> out(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

std::vector<double> covering_grid(std::span<const GaussianDist> dists, std::size_t points)
{
    require(!dists.empty(), "covering_grid: need at least one distribution");
    double lo = dists.front().mean();
    double hi = lo;
    double widest = 0.0;
    for (const auto& d : dists) {
        lo = std::min(lo, d.mean());
        hi = std::max(hi, d.mean());
        widest = std::max(widest, d.sd());
    }
    return linspace(lo - kGridHalfWidthSds * widest, hi + kGridHalfWidthSds * widest, points);
}

double tv_distance_grid(const GridDensity& p, const GridDensity& q)
{
    require(p.size() == q.size() && std::equal(p.grid().begin(), p.grid().end(), q.grid().begin()),
            "tv_distance_grid: densities are tabulated on different grids");
    const double tv = 0.5 * kernels::trapezoid_abs_diff(p.grid(), p.values(), q.values());
    return std::clamp(tv, 0.0, 1.0);
}

double kl_gaussian(const GaussianDist& p, const GaussianDist& q) noexcept
{
    const double diff = p.mean() - q.mean();
    return 0.5 * (std::log(q.variance() / p.variance()) + (p.variance() + diff * diff) / q.variance() - 1.0);
}

}  // namespace synmix
