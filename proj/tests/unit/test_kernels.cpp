#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "synmix/kernels.h"

using namespace synmix::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -5.0, double hi = 5.0)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(gen);
    }
    return v;
}

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference")
{
    const KernelSet* simd = avx2_kernels();
    if (simd == nullptr) {
        MESSAGE("AVX2 kernels unavailable on this machine; skipping");
        return;
    }
    const KernelSet& ref = scalar_kernels();
    // Odd lengths exercise the vector tails.
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 1000u, 4096u, 4099u}) {
        CAPTURE(n);
        const auto x = random_vector(n, 1 + n);
        const auto a = ref.shifted_moments(x.data(), n, 0.7);
        const auto b = simd->shifted_moments(x.data(), n, 0.7);
        CHECK(rel_err(b.sum, a.sum) < 1e-12);
        CHECK(rel_err(b.sum_sq, a.sum_sq) < 1e-12);

        std::vector<double> grid(n);
        for (std::size_t i = 0; i < n; ++i) {
            grid[i] = -6.0 + 12.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n, 2) - 1);
        }
        std::vector<double> oa(n, 0.1), ob(n, 0.1);
        ref.add_gaussian_bump(grid.data(), n, 0.3, 1.0 / 0.8, 0.5, oa.data());
        simd->add_gaussian_bump(grid.data(), n, 0.3, 1.0 / 0.8, 0.5, ob.data());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(rel_err(ob[i], oa[i]) < 1e-13);
        }
        if (n >= 2) {
            const auto p = random_vector(n, 100 + n, 0.0, 1.0);
            const auto q = random_vector(n, 200 + n, 0.0, 1.0);
            CHECK(rel_err(simd->trapezoid(grid.data(), p.data(), n), ref.trapezoid(grid.data(), p.data(), n)) < 1e-12);
            CHECK(rel_err(simd->trapezoid_abs_diff(grid.data(), p.data(), q.data(), n),
                          ref.trapezoid_abs_diff(grid.data(), p.data(), q.data(), n)) < 1e-12);
        }
    }
}

TEST_CASE("gaussian bump underflows to zero far from the mean in both variants")
{
    std::vector<const KernelSet*> sets = {&scalar_kernels()};
    if (avx2_kernels() != nullptr) {
        sets.push_back(avx2_kernels());
    }
    for (const auto* k : sets) {
        CAPTURE(k->name);
        std::vector<double> x = {-1e3, -40.0, 0.0, 40.0, 1e3, 1e300};
        std::vector<double> out(x.size(), 0.0);
        k->add_gaussian_bump(x.data(), x.size(), 0.0, 1.0, 1.0, out.data());
        CHECK(out[0] == 0.0);
        CHECK(out[2] == doctest::Approx(1.0));
        CHECK(out[4] == 0.0);
        CHECK(out[5] == 0.0);
        CHECK(std::isfinite(out[1]));
    }
}

TEST_CASE("trapezoid is exact for linear functions")
{
    std::vector<double> x = {0.0, 0.5, 1.5, 2.0, 3.0};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(2.0 * v + 1.0);
    }
    CHECK(trapezoid(x, y) == doctest::Approx(12.0));
    std::vector<double> z(x.size(), 0.0);
    CHECK(trapezoid_abs_diff(x, y, z) == doctest::Approx(12.0));
}

TEST_CASE("active kernels are one of the known sets")
{
    const std::string name = active_kernels().name;
    CHECK((name == scalar_kernels().name || (avx2_kernels() != nullptr && name == avx2_kernels()->name)));
}
