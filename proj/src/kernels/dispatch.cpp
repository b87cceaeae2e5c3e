#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string_view>

#include "synmix/kernels.h"

namespace synmix::kernels {

#if defined(SYNMIX_HAVE_AVX2_KERNELS)
extern const KernelSet kAvx2Kernels;
#endif

const KernelSet* avx2_kernels() noexcept
{
#if defined(SYNMIX_HAVE_AVX2_KERNELS)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2Kernels : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active_kernels() noexcept
{
    static const KernelSet* chosen = [] {
        const char* force = std::getenv("SYNMIX_FORCE_SCALAR");
        if (force != nullptr && std::string_view(force) != "0") {
            return &scalar_kernels();
        }
        const KernelSet* wide = avx2_kernels();
        return wide != nullptr ? wide : &scalar_kernels();
    }();
    return *chosen;
}

ShiftedMoments shifted_moments(std::span<const double> x, double shift) noexcept
{
    return active_kernels().shifted_moments(x.data(), x.size(), shift);
}

void add_gaussian_pdf(std::span<const double> grid, double mean, double sd, double weight,
                      std::span<double> out) noexcept
{
    const double scale = weight / (sd * std::sqrt(2.0 * std::numbers::pi));
    active_kernels().add_gaussian_bump(grid.data(), grid.size(), mean, 1.0 / sd, scale, out.data());
}

double trapezoid(std::span<const double> x, std::span<const double> y) noexcept
{
    return active_kernels().trapezoid(x.data(), y.data(), x.size());
}

double trapezoid_abs_diff(std::span<const double> x, std::span<const double> p,
                          std::span<const double> q) noexcept
{
    return active_kernels().trapezoid_abs_diff(x.data(), p.data(), q.data(), x.size());
}

}  // namespace synmix::kernels
