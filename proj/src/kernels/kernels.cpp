#include "gaitrad/kernels/kernels.hpp"

#include <cstdlib>

namespace gaitrad::kernels {

namespace scalar {

void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] * window[i];
}

void magnitude_squared(const cdouble* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = in[i].real();
        const double im = in[i].imag();
        out[i] = re * re + im * im;
    }
}

void accumulate(cdouble* acc, const cdouble* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase) {
    // Phase recurrence: z_{k+1} = z_k * w. For the chirp lengths used here
    // (n <= a few hundred) the accumulated rounding stays below 1e-13.
    cdouble z = amp * cdouble(std::cos(phase0), std::sin(phase0));
    const cdouble w(std::cos(dphase), std::sin(dphase));
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] += z;
        z *= w;
    }
}

}  // namespace scalar

namespace {

struct Dispatch {
    void (*apply_window)(const cdouble*, const double*, cdouble*, std::size_t);
    void (*magnitude_squared)(const cdouble*, double*, std::size_t);
    void (*accumulate)(cdouble*, const cdouble*, std::size_t);
    void (*axpy_real)(cdouble*, const cdouble*, double, std::size_t);
    void (*add_tone)(cdouble*, std::size_t, double, double, double);
    const char* name;
};

Dispatch select_backend() {
    Dispatch d{scalar::apply_window, scalar::magnitude_squared, scalar::accumulate,
               scalar::axpy_real, scalar::add_tone, "scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    const char* off = std::getenv("GAITRAD_NO_SIMD");
    if ((off == nullptr || off[0] == '0') && __builtin_cpu_supports("avx2") &&
        __builtin_cpu_supports("fma")) {
        d = Dispatch{avx2::apply_window, avx2::magnitude_squared, avx2::accumulate,
                     avx2::axpy_real, avx2::add_tone, "avx2"};
    }
#endif
    return d;
}

const Dispatch& backend() {
    static const Dispatch d = select_backend();
    return d;
}

}  // namespace

void apply_window(const cdouble* in, const double* window, cdouble* out, std::size_t n) {
    backend().apply_window(in, window, out, n);
}
void magnitude_squared(const cdouble* in, double* out, std::size_t n) {
    backend().magnitude_squared(in, out, n);
}
void accumulate(cdouble* acc, const cdouble* x, std::size_t n) {
    backend().accumulate(acc, x, n);
}
void axpy_real(cdouble* y, const cdouble* x, double a, std::size_t n) {
    backend().axpy_real(y, x, a, n);
}
void add_tone(cdouble* buf, std::size_t n, double amp, double phase0, double dphase) {
    backend().add_tone(buf, n, amp, phase0, dphase);
}

bool simd_active() { return backend().name[0] != 's'; }
const char* backend_name() { return backend().name; }

}  // namespace gaitrad::kernels
