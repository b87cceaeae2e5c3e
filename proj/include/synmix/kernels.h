#pragma once

// Data-parallel inner loops shared by the summary, density and distance code.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant. The variant is chosen once at runtime from CPUID; setting the
// environment variable SYNMIX_FORCE_SCALAR=1 pins the scalar reference.
// Variants agree with the reference to rounding (see tests/unit/test_kernels.cpp).

#include <cstddef>
#include <span>

namespace synmix::kernels {

struct ShiftedMoments {
    double sum = 0.0;     // sum of (x - shift)
    double sum_sq = 0.0;  // sum of (x - shift)^2
};

struct KernelSet {
    const char* name;
    ShiftedMoments (*shifted_moments)(const double* x, std::size_t n, double shift);
    // out[i] += scale * exp(-0.5 * ((x[i] - mean) * inv_sd)^2)
    void (*add_gaussian_bump)(const double* x, std::size_t n, double mean, double inv_sd, double scale,
                              double* out);
    double (*trapezoid)(const double* x, const double* y, std::size_t n);
    double (*trapezoid_abs_diff)(const double* x, const double* p, const double* q, std::size_t n);
};

const KernelSet& scalar_kernels() noexcept;
/// nullptr when the binary or the CPU lacks AVX2+FMA.
const KernelSet* avx2_kernels() noexcept;
const KernelSet& active_kernels() noexcept;

// Convenience wrappers over active_kernels().

ShiftedMoments shifted_moments(std::span<const double> x, double shift) noexcept;
void add_gaussian_pdf(std::span<const double> grid, double mean, double sd, double weight,
                      std::span<double> out) noexcept;
double trapezoid(std::span<const double> x, std::span<const double> y) noexcept;
double trapezoid_abs_diff(std::span<const double> x, std::span<const double> p,
                          std::span<const double> q) noexcept;

}  // namespace synmix::kernels
