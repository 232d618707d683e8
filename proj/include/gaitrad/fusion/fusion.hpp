#pragma once

#include <cstdint>
#include <vector>

#include "gaitrad/dsp/pipeline.hpp"

namespace gaitrad::fusion {

// SNR-selected splice of two aligned Doppler-time matrices. Frames are taken
// verbatim from one input or the other, never blended.
struct FusedDopplerMatrix {
    dsp::DopplerTimeMatrix matrix;
    std::vector<std::uint8_t> provenance;  // 0 = first input, 1 = second
    std::vector<double> snr_trace_db;      // smoothed SNR of the selected node

    std::size_t switch_count() const;
};

struct FusionParams {
    double hysteresis_db = 1.0;
};

// Mirrors the matrix about 0 Hz. Requires the symmetric (odd-bin) axis.
dsp::DopplerTimeMatrix doppler_flip(const dsp::DopplerTimeMatrix& dtm);

// Frame-wise selection of the higher-SNR input with switching hysteresis;
// ties keep the previously selected node. The second input must already be
// flipped into the first input's Doppler sign convention.
FusedDopplerMatrix combine(const dsp::DopplerTimeMatrix& near, const dsp::DopplerTimeMatrix& far,
                           const std::vector<double>& snr_near_db,
                           const std::vector<double>& snr_far_db, const FusionParams& p = {});

}  // namespace gaitrad::fusion
