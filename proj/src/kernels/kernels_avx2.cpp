#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "gaitrad/kernels/kernels.hpp"

// AVX2 variants. std::complex<double> is laid out as [re, im], so one __m256d
// carries two complex values.

namespace gaitrad::kernels::avx2 {

namespace {

// (ar,ai) * (br,bi) for two packed complex doubles per register.
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d are = _mm256_movedup_pd(a);          // ar0 ar0 ar1 ar1
    const __m256d aim = _mm256_permute_pd(a, 0xF);     // ai0 ai0 ai1 ai1
    const __m256d bsw = _mm256_permute_pd(b, 0x5);     // bi0 br0 bi1 br1
    return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

}  // namespace

void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n) {
    const double* src = reinterpret_cast<const double*>(in);
    double* dst = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m128d w01 = _mm_loadu_pd(window + i);
        const __m256d w = _mm256_set_m128d(_mm_unpackhi_pd(w01, w01), _mm_unpacklo_pd(w01, w01));
        const __m256d v = _mm256_loadu_pd(src + 2 * i);
        _mm256_storeu_pd(dst + 2 * i, _mm256_mul_pd(v, w));
    }
    for (; i < n; ++i) out[i] = in[i] * window[i];
}

void magnitude_squared(const cdouble* in, double* out, std::size_t n) {
    const double* src = reinterpret_cast<const double*>(in);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(src + 2 * i);      // z0 z1
        const __m256d b = _mm256_loadu_pd(src + 2 * i + 4);  // z2 z3
        const __m256d ha = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
        // hadd interleaves lanes: |z0| |z2| |z1| |z3|
        const __m256d res = _mm256_permute4x64_pd(ha, _MM_SHUFFLE(3, 1, 2, 0));
        _mm256_storeu_pd(out + i, res);
    }
    for (; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = re * re + im * im;
    }
}

void accumulate(cdouble* acc, const cdouble* x, std::size_t n) {
    double* a = reinterpret_cast<double*>(acc);
    const double* b = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(a + 2 * i,
                         _mm256_add_pd(_mm256_loadu_pd(a + 2 * i), _mm256_loadu_pd(b + 2 * i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n) {
    double* yd = reinterpret_cast<double*>(y);
    const double* xd = reinterpret_cast<const double*>(x);
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d r =
            _mm256_fmadd_pd(av, _mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(yd + 2 * i));
        _mm256_storeu_pd(yd + 2 * i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase) {
    double* bd = reinterpret_cast<double*>(buf);
    // Four phase lanes advancing by 4*dphase each step.
    const cdouble z0 = amp * cdouble(std::cos(phase0), std::sin(phase0));
    const cdouble w1(std::cos(dphase), std::sin(dphase));
    const cdouble z1 = z0 * w1, z2 = z1 * w1, z3 = z2 * w1;
    const cdouble w4 = (w1 * w1) * (w1 * w1);
    __m256d za = _mm256_setr_pd(z0.real(), z0.imag(), z1.real(), z1.imag());
    __m256d zb = _mm256_setr_pd(z2.real(), z2.imag(), z3.real(), z3.imag());
    const __m256d wv = _mm256_setr_pd(w4.real(), w4.imag(), w4.real(), w4.imag());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(bd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(bd + 2 * i), za));
        _mm256_storeu_pd(bd + 2 * i + 4, _mm256_add_pd(_mm256_loadu_pd(bd + 2 * i + 4), zb));
        za = cmul(za, wv);
        zb = cmul(zb, wv);
    }
    if (i < n) {
        cdouble z = amp * cdouble(std::cos(phase0 + double(i) * dphase),
                                  std::sin(phase0 + double(i) * dphase));
        for (; i < n; ++i) {
            buf[i] += z;
            z *= w1;
        }
    }
}

}  // namespace gaitrad::kernels::avx2

#endif  // x86-64
