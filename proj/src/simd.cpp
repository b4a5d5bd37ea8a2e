#include "gpide/simd.hpp"

#include <immintrin.h>

namespace gpide::simd {

bool have_avx2() {
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
}

void axpy_scalar(double* dst, const double* src, std::size_t n, double a) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void add_constant_scalar(double* dst, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += c;
}

void max_inplace_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (src[i] > dst[i]) dst[i] = src[i];
}

__attribute__((target("avx2"))) void axpy_avx2(double* dst, const double* src, std::size_t n,
                                               double a) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        // mul + add kept separate: bitwise-matches the scalar path with
        // contraction disabled.
        d = _mm256_add_pd(d, _mm256_mul_pd(va, s));
        _mm256_storeu_pd(dst + i, d);
    }
    for (; i < n; ++i) dst[i] += a * src[i];
}

__attribute__((target("avx2"))) void add_constant_avx2(double* dst, std::size_t n, double c) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), vc));
    }
    for (; i < n; ++i) dst[i] += c;
}

__attribute__((target("avx2"))) void max_inplace_avx2(double* dst, const double* src,
                                                      std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_max_pd(d, s));
    }
    for (; i < n; ++i)
        if (src[i] > dst[i]) dst[i] = src[i];
}

void axpy(double* dst, const double* src, std::size_t n, double a) {
    if (have_avx2())
        axpy_avx2(dst, src, n, a);
    else
        axpy_scalar(dst, src, n, a);
}

void add_constant(double* dst, std::size_t n, double c) {
    if (have_avx2())
        add_constant_avx2(dst, n, c);
    else
        add_constant_scalar(dst, n, c);
}

void max_inplace(double* dst, const double* src, std::size_t n) {
    if (have_avx2())
        max_inplace_avx2(dst, src, n);
    else
        max_inplace_scalar(dst, src, n);
}

}  // namespace gpide::simd
