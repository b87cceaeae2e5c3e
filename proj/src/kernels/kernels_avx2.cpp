// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <cmath>

#include "synmix/kernels.h"

namespace synmix::kernels {
namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x <= 0; returns 0 below the normal range.
// Range reduction x = k ln2 + r, |r| <= ln2/2, then a degree-13 Taylor
// polynomial (truncation < 1e-17 relative) and exponent-bit scaling.
inline __m256d exp_nonpositive(__m256d x)
{
    const __m256d lower = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
    x = _mm256_max_pd(x, lower);

    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i k32 = _mm256_cvtpd_epi32(k);
    __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(k32), _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, result);
}

ShiftedMoments avx2_shifted_moments(const double* x, std::size_t n, double shift)
{
    const __m256d s = _mm256_set1_pd(shift);
    __m256d sum0 = _mm256_setzero_pd(), sum1 = _mm256_setzero_pd();
    __m256d sq0 = _mm256_setzero_pd(), sq1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), s);
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), s);
        sum0 = _mm256_add_pd(sum0, d0);
        sum1 = _mm256_add_pd(sum1, d1);
        sq0 = _mm256_fmadd_pd(d0, d0, sq0);
        sq1 = _mm256_fmadd_pd(d1, d1, sq1);
    }
    ShiftedMoments m{hsum(_mm256_add_pd(sum0, sum1)), hsum(_mm256_add_pd(sq0, sq1))};
    for (; i < n; ++i) {
        const double d = x[i] - shift;
        m.sum += d;
        m.sum_sq += d * d;
    }
    return m;
}

void avx2_add_gaussian_bump(const double* x, std::size_t n, double mean, double inv_sd, double scale,
                            double* out)
{
    const __m256d vm = _mm256_set1_pd(mean);
    const __m256d vinv = _mm256_set1_pd(inv_sd);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d neg_half = _mm256_set1_pd(-0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vm), vinv);
        const __m256d e = exp_nonpositive(_mm256_mul_pd(neg_half, _mm256_mul_pd(z, z)));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vscale, e, _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) {
        const double z = (x[i] - mean) * inv_sd;
        out[i] += scale * std::exp(-0.5 * z * z);
    }
}

double avx2_trapezoid(const double* x, const double* y, std::size_t n)
{
    if (n < 2) {
        return 0.0;
    }
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
        const __m256d sy = _mm256_add_pd(_mm256_loadu_pd(y + i + 1), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(dx, sy, acc);
    }
    double total = hsum(acc);
    for (; i + 1 < n; ++i) {
        total += (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    }
    return 0.5 * total;
}

double avx2_trapezoid_abs_diff(const double* x, const double* p, const double* q, std::size_t n)
{
    if (n < 2) {
        return 0.0;
    }
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
        const __m256d a = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i)));
        const __m256d b =
            _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(p + i + 1), _mm256_loadu_pd(q + i + 1)));
        acc = _mm256_fmadd_pd(dx, _mm256_add_pd(a, b), acc);
    }
    double total = hsum(acc);
    for (; i + 1 < n; ++i) {
        total += (x[i + 1] - x[i]) * (std::abs(p[i] - q[i]) + std::abs(p[i + 1] - q[i + 1]));
    }
    return 0.5 * total;
}

}  // namespace

extern const KernelSet kAvx2Kernels;
const KernelSet kAvx2Kernels{"avx2", avx2_shifted_moments, avx2_add_gaussian_bump, avx2_trapezoid,
                             avx2_trapezoid_abs_diff};

}  // namespace synmix::kernels
