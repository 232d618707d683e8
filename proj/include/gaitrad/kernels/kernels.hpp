#pragma once

#include <cstddef>

#include "gaitrad/common.hpp"

// Arithmetic inner loops shared by the simulator and the DSP chain.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected once at startup from CPUID. The two are equivalence-tested
// against each other; setting the environment variable GAITRAD_NO_SIMD=1
// forces the scalar path.

namespace gaitrad::kernels {

// out[i] = in[i] * window[i]
void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n);

// out[i] = |in[i]|^2
void magnitude_squared(const cdouble* in, double* out, std::size_t n);

// acc[i] += x[i]
void accumulate(cdouble* acc, const cdouble* x, std::size_t n);

// y[i] += a * x[i], real coefficient (FIR tap applied across a row)
void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n);

// buf[k] += amp * exp(i*(phase0 + k*dphase)), k = 0..n-1
void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase);

// True when the AVX2 variants are active.
bool simd_active();

// Name of the selected implementation ("scalar" or "avx2").
const char* backend_name();

namespace scalar {
void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n);
void magnitude_squared(const cdouble* in, double* out, std::size_t n);
void accumulate(cdouble* acc, const cdouble* x, std::size_t n);
void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n);
void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n);
void magnitude_squared(const cdouble* in, double* out, std::size_t n);
void accumulate(cdouble* acc, const cdouble* x, std::size_t n);
void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n);
void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase);
}  // namespace avx2
#endif

}  // namespace gaitrad::kernels
