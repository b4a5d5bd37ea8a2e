#pragma once

#include <cstddef>

namespace gpide::simd {

/// True when the running CPU supports AVX2 (queried once).
bool have_avx2();

// The three field kernels of the solver hot loop.  Each has a scalar
// reference implementation and an AVX2 variant; the unprefixed entry points
// dispatch at first use.  The AVX2 variants use separate multiply/add (no
// FMA) and the build disables FP contraction, so scalar and vector paths are
// bitwise identical -- the equivalence test asserts exact equality.

/// dst[i] += a * src[i]
void axpy(double* dst, const double* src, std::size_t n, double a);
void axpy_scalar(double* dst, const double* src, std::size_t n, double a);
void axpy_avx2(double* dst, const double* src, std::size_t n, double a);

/// dst[i] += c
void add_constant(double* dst, std::size_t n, double c);
void add_constant_scalar(double* dst, std::size_t n, double c);
void add_constant_avx2(double* dst, std::size_t n, double c);

/// dst[i] = max(dst[i], src[i])
void max_inplace(double* dst, const double* src, std::size_t n);
void max_inplace_scalar(double* dst, const double* src, std::size_t n);
void max_inplace_avx2(double* dst, const double* src, std::size_t n);

}  // namespace gpide::simd
