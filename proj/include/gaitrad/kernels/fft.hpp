#pragma once

#include <cstddef>
#include <vector>

#include "gaitrad/common.hpp"

namespace gaitrad::kernels {

// Complex FFT plan for a fixed length. Power-of-two lengths run the iterative
// radix-2 transform directly; other lengths go through Bluestein's chirp-z
// reformulation on a padded power-of-two grid. Twiddles and chirp tables are
// precomputed per plan. A plan holds scratch space, so use one plan per
// thread.
class Fft {
  public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    // Unnormalized forward DFT: out[k] = sum_j in[j] * exp(-2*pi*i*j*k/n).
    void forward(const cdouble* in, cdouble* out) const;

    // Inverse DFT with 1/n normalization.
    void inverse(const cdouble* in, cdouble* out) const;

  private:
    void pow2_transform(cdouble* data) const;  // in-place, forward direction
    void bluestein_forward(const cdouble* in, cdouble* out) const;

    std::size_t n_ = 0;
    std::size_t m_ = 0;  // padded pow2 length (Bluestein), or n_ when pow2
    bool pow2_ = false;
    std::vector<std::size_t> bitrev_;     // for length m_
    std::vector<cdouble> twiddles_;       // for length m_
    std::vector<cdouble> chirp_;          // exp(-i*pi*k^2/n), k < n
    std::vector<cdouble> chirp_fft_;      // FFT of the padded conjugate chirp
    mutable std::vector<cdouble> work_;   // scratch, length m_
};

}  // namespace gaitrad::kernels
