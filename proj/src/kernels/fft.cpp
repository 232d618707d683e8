#include "gaitrad/kernels/fft.hpp"

#include <algorithm>

namespace gaitrad::kernels {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::size_t> make_bitrev(std::size_t n) {
    std::vector<std::size_t> rev(n, 0);
    std::size_t bits = 0;
    while ((std::size_t(1) << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (bits - 1 - b);
        rev[i] = r;
    }
    return rev;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("Fft: zero length");
    pow2_ = is_pow2(n);
    m_ = pow2_ ? n : next_pow2(2 * n - 1);
    bitrev_ = make_bitrev(m_);
    twiddles_.resize(m_ / 2);
    for (std::size_t k = 0; k < m_ / 2; ++k) {
        const double ang = -2.0 * kPi * double(k) / double(m_);
        twiddles_[k] = cdouble(std::cos(ang), std::sin(ang));
    }
    if (!pow2_) {
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            // k^2 mod 2n keeps the phase argument small and exact.
            const std::size_t k2 = (k * k) % (2 * n_);
            const double ang = -kPi * double(k2) / double(n_);
            chirp_[k] = cdouble(std::cos(ang), std::sin(ang));
        }
        std::vector<cdouble> b(m_, cdouble(0.0, 0.0));
        b[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            b[k] = std::conj(chirp_[k]);
            b[m_ - k] = std::conj(chirp_[k]);
        }
        work_ = b;
        pow2_transform(work_.data());
        chirp_fft_ = work_;
    }
    work_.assign(m_, cdouble(0.0, 0.0));
}

void Fft::pow2_transform(cdouble* data) const {
    const std::size_t n = m_;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            std::size_t tw = 0;
            for (std::size_t k = 0; k < half; ++k, tw += step) {
                const cdouble w = twiddles_[tw];
                const cdouble u = data[start + k];
                const cdouble v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
}

void Fft::bluestein_forward(const cdouble* in, cdouble* out) const {
    std::fill(work_.begin(), work_.end(), cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < n_; ++k) work_[k] = in[k] * chirp_[k];
    pow2_transform(work_.data());
    for (std::size_t k = 0; k < m_; ++k) work_[k] *= chirp_fft_[k];
    // inverse pow2 transform via conjugation
    for (auto& v : work_) v = std::conj(v);
    pow2_transform(work_.data());
    const double inv_m = 1.0 / double(m_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = std::conj(work_[k]) * inv_m * chirp_[k];
}

void Fft::forward(const cdouble* in, cdouble* out) const {
    if (pow2_) {
        if (out != in) std::copy(in, in + n_, out);
        pow2_transform(out);
    } else {
        bluestein_forward(in, out);
    }
}

void Fft::inverse(const cdouble* in, cdouble* out) const {
    std::vector<cdouble> tmp(n_);
    for (std::size_t k = 0; k < n_; ++k) tmp[k] = std::conj(in[k]);
    forward(tmp.data(), out);
    const double inv_n = 1.0 / double(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = std::conj(out[k]) * inv_n;
}

}  // namespace gaitrad::kernels
