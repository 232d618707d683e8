#pragma once

#include <cstdint>
#include <vector>

#include "gaitrad/common.hpp"
#include "gaitrad/sim/radar.hpp"

namespace gaitrad::dsp {

// Per-chirp range profiles stacked over slow time, frame-major.
struct RangeTimeMatrix {
    std::size_t n_frames = 0;
    std::size_t n_bins = 0;
    std::vector<cdouble> values;
    double bin_spacing_m = 0.0;
    double frame_rate_hz = 0.0;
    double t0_s = 0.0;  // time of frame 0 (advances when settling frames drop)
    bool clutter_filtered = false;

    const cdouble* frame(std::size_t f) const { return values.data() + f * n_bins; }
    cdouble* frame(std::size_t f) { return values.data() + f * n_bins; }
    double range_of_bin(std::size_t b) const { return double(b) * bin_spacing_m; }
    double time_of_frame(std::size_t f) const { return t0_s + double(f) / frame_rate_hz; }
};

// Power STFT of the integrated target signal. The Doppler axis has an odd
// bin count, symmetric about 0 Hz (the Nyquist bin is dropped). Power is
// stored as float32; long walks at unit hop make this the largest buffer in
// the pipeline, and every consumer works on envelopes and ratios.
struct DopplerTimeMatrix {
    std::size_t n_frames = 0;
    std::size_t n_bins = 0;
    std::vector<float> power;
    double bin_hz = 0.0;
    double frame_rate_hz = 0.0;
    double t0_s = 0.0;      // window-center time of frame 0
    double window_s = 0.0;  // analysis window length T_M
    double f0_hz = 0.0;     // carrier, carried along for velocity conversion

    const float* frame(std::size_t f) const { return power.data() + f * n_bins; }
    float* frame(std::size_t f) { return power.data() + f * n_bins; }
    int center_bin() const { return int(n_bins - 1) / 2; }
    double doppler_of_bin(std::size_t b) const {
        return (double(b) - double(center_bin())) * bin_hz;
    }
    double time_of_frame(std::size_t f) const { return t0_s + double(f) / frame_rate_hz; }
};

// Contiguous target span per frame; first > last encodes an empty frame.
struct TargetMask {
    struct Span {
        std::uint32_t first = 1;
        std::uint32_t last = 0;
        bool empty() const { return first > last; }
        std::uint32_t width() const { return empty() ? 0 : last - first + 1; }
    };
    std::vector<Span> spans;
};

// Complex slow-time series with its time axis.
struct SlowTimeSeries {
    std::vector<cdouble> values;
    double frame_rate_hz = 0.0;
    double t0_s = 0.0;
};

struct DspParams {
    double clutter_cutoff_hz = 10.0;
    double clutter_window_s = 0.0625;   // FIR span; taps = odd(round(span * fr))
    double target_threshold_db = 12.0;  // above the per-frame median floor
    double stft_window_s = 0.05;        // T_M
    std::size_t stft_min_bins = 256;
    std::size_t snr_top_bins = 5;
    double snr_smooth_s = 0.25;
};

// Hann-windowed FFT of every chirp, scaled so output energy equals windowed
// input energy. Bin spacing is fs*c*Tc/(2*B*N) = c/(2B) for integer fs*Tc.
RangeTimeMatrix range_transform(const sim::IqCube& cube, const sim::RadarWaveform& wf);

// Slow-time high-pass (linear-phase FIR, 10 Hz cutoff, exact null at DC).
// The group-delay frames at both ends are dropped and t0 advances to match.
RangeTimeMatrix clutter_filter(const RangeTimeMatrix& rtm, const DspParams& p = {});

// Per frame, the contiguous bin run around the power argmax that clears the
// median noise floor by target_threshold_db; empty when nothing clears it.
TargetMask select_target_bins(const RangeTimeMatrix& rtm, const DspParams& p = {});

// Coherent sum over the masked bins, S_sigma(tau); empty frames give 0.
SlowTimeSeries integrate_bins(const RangeTimeMatrix& rtm, const TargetMask& mask);

// Magnitude-squared STFT with a Hann window of stft_window_s and unit hop.
DopplerTimeMatrix doppler_transform(const SlowTimeSeries& series, double f0_hz,
                                    const DspParams& p = {});

// Per-frame SNR in dB: mean of the top-K bins over the median-based noise
// level, with the white-noise order-statistics bias removed and a short
// moving average applied. Noise-only frames sit near (or below) 0 dB.
std::vector<double> estimate_frame_snr(const DopplerTimeMatrix& dtm, const DspParams& p = {});

double doppler_to_velocity(double f_d_hz, double f0_hz);
double velocity_to_doppler(double v_mps, double f0_hz);

// High-pass taps used by clutter_filter, exposed for the filter-response tests.
std::vector<double> clutter_filter_taps(double frame_rate_hz, const DspParams& p = {});

}  // namespace gaitrad::dsp
