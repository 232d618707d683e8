#include "gaitrad/fusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace gaitrad::fusion {

std::size_t FusedDopplerMatrix::switch_count() const {
    std::size_t n = 0;
    for (std::size_t f = 1; f < provenance.size(); ++f)
        if (provenance[f] != provenance[f - 1]) ++n;
    return n;
}

dsp::DopplerTimeMatrix doppler_flip(const dsp::DopplerTimeMatrix& dtm) {
    if (dtm.n_bins % 2 == 0)
        throw PipelineError("doppler_flip requires a symmetric (odd-bin) Doppler axis");
    dsp::DopplerTimeMatrix out = dtm;
    for (std::size_t f = 0; f < dtm.n_frames; ++f) {
        const float* src = dtm.frame(f);
        float* dst = out.frame(f);
        for (std::size_t b = 0; b < dtm.n_bins; ++b) dst[b] = src[dtm.n_bins - 1 - b];
    }
    return out;
}

FusedDopplerMatrix combine(const dsp::DopplerTimeMatrix& near, const dsp::DopplerTimeMatrix& far,
                           const std::vector<double>& snr_near_db,
                           const std::vector<double>& snr_far_db, const FusionParams& p) {
    if (near.n_frames != far.n_frames || near.n_bins != far.n_bins)
        throw PipelineError("combine: shape mismatch between nodes");
    if (std::abs(near.t0_s - far.t0_s) > 0.25 / near.frame_rate_hz ||
        near.frame_rate_hz != far.frame_rate_hz || near.bin_hz != far.bin_hz)
        throw PipelineError("combine: misaligned axes");
    if (snr_near_db.size() != near.n_frames || snr_far_db.size() != near.n_frames)
        throw PipelineError("combine: SNR trace length mismatch");

    FusedDopplerMatrix fused;
    fused.matrix = near;  // axes and storage shape
    fused.provenance.resize(near.n_frames);
    fused.snr_trace_db.resize(near.n_frames);

    std::uint8_t cur = (!snr_far_db.empty() && snr_far_db[0] > snr_near_db[0]) ? 1 : 0;
    for (std::size_t f = 0; f < near.n_frames; ++f) {
        if (cur == 0) {
            if (snr_far_db[f] > snr_near_db[f] + p.hysteresis_db) cur = 1;
        } else {
            if (snr_near_db[f] > snr_far_db[f] + p.hysteresis_db) cur = 0;
        }
        const dsp::DopplerTimeMatrix& src = cur == 0 ? near : far;
        std::memcpy(fused.matrix.frame(f), src.frame(f), near.n_bins * sizeof(float));
        fused.provenance[f] = cur;
        fused.snr_trace_db[f] = cur == 0 ? snr_near_db[f] : snr_far_db[f];
    }
    return fused;
}

}  // namespace gaitrad::fusion
