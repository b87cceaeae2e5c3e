#include <cmath>

#include "synmix/kernels.h"

namespace synmix::kernels {
namespace {

ShiftedMoments scalar_shifted_moments(const double* x, std::size_t n, double shift)
{
    ShiftedMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - shift;
        m.sum += d;
        m.sum_sq += d * d;
    }
    return m;
}

void scalar_add_gaussian_bump(const double* x, std::size_t n, double mean, double inv_sd, double scale,
                              double* out)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (x[i] - mean) * inv_sd;
        out[i] += scale * std::exp(-0.5 * z * z);
    }
}

double scalar_trapezoid(const double* x, const double* y, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc += (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    }
    return 0.5 * acc;
}

double scalar_trapezoid_abs_diff(const double* x, const double* p, const double* q, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc += (x[i + 1] - x[i]) * (std::abs(p[i] - q[i]) + std::abs(p[i + 1] - q[i + 1]));
    }
    return 0.5 * acc;
}

constexpr KernelSet kScalar{"scalar", scalar_shifted_moments, scalar_add_gaussian_bump, scalar_trapezoid,
                            scalar_trapezoid_abs_diff};

}  // namespace

const KernelSet& scalar_kernels() noexcept { return kScalar; }

}  // namespace synmix::kernels
