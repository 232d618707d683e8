#include "gaitrad/dsp/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "gaitrad/kernels/fft.hpp"
#include "gaitrad/kernels/kernels.hpp"

namespace gaitrad::dsp {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * double(i) / double(n)));
    return w;
}

double frame_median_power(const double* p, std::size_t n, std::vector<double>& scratch) {
    scratch.assign(p, p + n);
    auto mid = scratch.begin() + long(n / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    return *mid;
}

}  // namespace

RangeTimeMatrix range_transform(const sim::IqCube& cube, const sim::RadarWaveform& wf) {
    wf.validate();
    if (wf.b_hz <= 0.0) throw std::invalid_argument("range transform needs nonzero bandwidth");
    const std::size_t n = cube.n_samples;
    if (n < 8) throw PipelineError("samples_per_chirp below 8");
    if (n != wf.samples_per_chirp())
        throw PipelineError("cube sample count does not match the waveform");

    RangeTimeMatrix rtm;
    rtm.n_frames = cube.n_chirps;
    rtm.n_bins = n;
    rtm.frame_rate_hz = wf.chirp_rate_hz();
    rtm.bin_spacing_m = wf.fs_hz * kSpeedOfLight * wf.tc_s / (2.0 * wf.b_hz * double(n));
    rtm.values.resize(rtm.n_frames * n);

    const std::vector<double> win = hann_window(n);
    const double scale = 1.0 / std::sqrt(double(n));
    kernels::Fft fft(n);
    std::vector<cdouble> chirp(n), spec(n);
    for (std::size_t m = 0; m < cube.n_chirps; ++m) {
        const cfloat* src = cube.chirp(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(src[i].real()) || !std::isfinite(src[i].imag()))
                throw PipelineError("non-finite IQ sample");
            chirp[i] = cdouble(src[i].real(), src[i].imag());
        }
        kernels::apply_window(chirp.data(), win.data(), chirp.data(), n);
        fft.forward(chirp.data(), spec.data());
        cdouble* dst = rtm.frame(m);
        for (std::size_t i = 0; i < n; ++i) dst[i] = spec[i] * scale;
    }
    return rtm;
}

std::vector<double> clutter_filter_taps(double frame_rate_hz, const DspParams& p) {
    std::size_t taps = std::size_t(std::llround(p.clutter_window_s * frame_rate_hz));
    taps = std::max<std::size_t>(taps, 31);
    if (taps % 2 == 0) ++taps;
    const std::size_t half = taps / 2;
    const double fc = p.clutter_cutoff_hz / frame_rate_hz;  // normalized cutoff

    // Hamming-windowed sinc low-pass, normalized to unit DC gain, then
    // spectrally inverted. The exact DC null is what kills static clutter.
    std::vector<double> lp(taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < taps; ++i) {
        const double k = double(i) - double(half);
        const double sinc = k == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * k) / (kPi * k);
        const double w = 0.54 - 0.46 * std::cos(2.0 * kPi * double(i) / double(taps - 1));
        lp[i] = sinc * w;
        sum += lp[i];
    }
    std::vector<double> hp(taps);
    for (std::size_t i = 0; i < taps; ++i) hp[i] = -lp[i] / sum;
    hp[half] += 1.0;
    return hp;
}

RangeTimeMatrix clutter_filter(const RangeTimeMatrix& rtm, const DspParams& p) {
    if (rtm.frame_rate_hz <= 20.0) throw PipelineError("frame rate too low for 10 Hz clutter filter");
    const std::vector<double> taps = clutter_filter_taps(rtm.frame_rate_hz, p);
    const std::size_t L = taps.size();
    if (rtm.n_frames < L + 1) throw PipelineError("record shorter than the filter settling length");

    RangeTimeMatrix out;
    out.n_frames = rtm.n_frames - (L - 1);
    out.n_bins = rtm.n_bins;
    out.bin_spacing_m = rtm.bin_spacing_m;
    out.frame_rate_hz = rtm.frame_rate_hz;
    out.t0_s = rtm.t0_s + double(L / 2) / rtm.frame_rate_hz;
    out.clutter_filtered = true;
    out.values.assign(out.n_frames * out.n_bins, cdouble(0.0, 0.0));

    // Symmetric taps, so correlation against forward frames equals the
    // group-delay-compensated convolution.
    for (std::size_t g = 0; g < out.n_frames; ++g) {
        cdouble* dst = out.frame(g);
        for (std::size_t j = 0; j < L; ++j)
            kernels::axpy_real(dst, rtm.frame(g + j), taps[j], out.n_bins);
    }
    return out;
}

TargetMask select_target_bins(const RangeTimeMatrix& rtm, const DspParams& p) {
    if (!rtm.clutter_filtered) throw PipelineError("target selection requires a clutter-filtered matrix");
    const double thr = db_to_linear(p.target_threshold_db);
    TargetMask mask;
    mask.spans.resize(rtm.n_frames);
    std::vector<double> power(rtm.n_bins), scratch;
    for (std::size_t f = 0; f < rtm.n_frames; ++f) {
        kernels::magnitude_squared(rtm.frame(f), power.data(), rtm.n_bins);
        const double floor = frame_median_power(power.data(), rtm.n_bins, scratch);
        const double cut = floor * thr;
        std::size_t peak = 0;
        for (std::size_t b = 1; b < rtm.n_bins; ++b)
            if (power[b] > power[peak]) peak = b;
        if (!(power[peak] > cut)) continue;  // leave the frame empty
        std::size_t lo = peak, hi = peak;
        while (lo > 0 && power[lo - 1] > cut) --lo;
        while (hi + 1 < rtm.n_bins && power[hi + 1] > cut) ++hi;
        mask.spans[f] = {std::uint32_t(lo), std::uint32_t(hi)};
    }
    return mask;
}

SlowTimeSeries integrate_bins(const RangeTimeMatrix& rtm, const TargetMask& mask) {
    if (mask.spans.size() != rtm.n_frames)
        throw PipelineError("mask frame count does not match the matrix");
    SlowTimeSeries s;
    s.frame_rate_hz = rtm.frame_rate_hz;
    s.t0_s = rtm.t0_s;
    s.values.assign(rtm.n_frames, cdouble(0.0, 0.0));
    for (std::size_t f = 0; f < rtm.n_frames; ++f) {
        const auto& span = mask.spans[f];
        if (span.empty()) continue;
        const cdouble* row = rtm.frame(f);
        cdouble acc(0.0, 0.0);
        for (std::uint32_t b = span.first; b <= span.last; ++b) acc += row[b];
        s.values[f] = acc;
    }
    return s;
}

DopplerTimeMatrix doppler_transform(const SlowTimeSeries& series, double f0_hz,
                                    const DspParams& p) {
    const std::size_t w = std::size_t(std::llround(p.stft_window_s * series.frame_rate_hz));
    if (w < 4) throw PipelineError("STFT window too short at this frame rate");
    if (series.values.size() <= w) throw PipelineError("series shorter than the STFT window");

    std::size_t nfft = p.stft_min_bins;
    while (nfft < w) nfft <<= 1;

    DopplerTimeMatrix dtm;
    dtm.n_frames = series.values.size() - w + 1;
    dtm.n_bins = nfft - 1;  // Nyquist bin dropped; axis symmetric about 0
    dtm.bin_hz = series.frame_rate_hz / double(nfft);
    dtm.frame_rate_hz = series.frame_rate_hz;
    dtm.t0_s = series.t0_s + 0.5 * double(w - 1) / series.frame_rate_hz;
    dtm.window_s = double(w) / series.frame_rate_hz;
    dtm.f0_hz = f0_hz;
    dtm.power.resize(dtm.n_frames * dtm.n_bins);

    const std::vector<double> win = hann_window(w);
    kernels::Fft fft(nfft);
    std::vector<cdouble> buf(nfft), spec(nfft);
    std::vector<double> mag(nfft);
    const int half = int(nfft) / 2;
    for (std::size_t f = 0; f < dtm.n_frames; ++f) {
        std::fill(buf.begin() + long(w), buf.end(), cdouble(0.0, 0.0));
        kernels::apply_window(series.values.data() + f, win.data(), buf.data(), w);
        fft.forward(buf.data(), spec.data());
        kernels::magnitude_squared(spec.data(), mag.data(), nfft);
        float* dst = dtm.frame(f);
        // negative frequencies first (skipping the Nyquist bin), then 0..+
        for (int j = 1; j < half; ++j) dst[j - 1] = float(mag[std::size_t(half + j)]);
        for (int j = 0; j < half; ++j) dst[half - 1 + j] = float(mag[std::size_t(j)]);
    }
    return dtm;
}

std::vector<double> estimate_frame_snr(const DopplerTimeMatrix& dtm, const DspParams& p) {
    const std::size_t k = std::max<std::size_t>(1, std::min(p.snr_top_bins, dtm.n_bins));
    // E[mean of top-k] / E[mean] for iid exponential bin powers; subtracting
    // it re-centers noise-only frames at zero.
    double h = 0.0, h_partial = 0.0;
    std::vector<double> hs(k, 0.0);
    for (std::size_t i = 1; i <= dtm.n_bins; ++i) {
        h += 1.0 / double(i);
        if (i < k) hs[i] = h;
    }
    for (std::size_t r = 0; r < k; ++r) h_partial += hs[r];
    const double bias = h - h_partial / double(k);

    std::vector<double> net(dtm.n_frames, 0.0);
    std::vector<double> scratch;
    for (std::size_t f = 0; f < dtm.n_frames; ++f) {
        const float* row = dtm.frame(f);
        scratch.assign(row, row + dtm.n_bins);
        auto kth = scratch.begin() + long(k - 1);
        std::nth_element(scratch.begin(), kth, scratch.end(), std::greater<double>());
        double top = 0.0;
        for (std::size_t i = 0; i < k; ++i) top += scratch[i];
        top /= double(k);
        auto mid = scratch.begin() + long(dtm.n_bins / 2);
        std::nth_element(scratch.begin(), mid, scratch.end());
        const double noise = std::max(*mid / kLn2, 1e-300);
        net[f] = top / noise - bias;
    }
    const std::size_t half = std::size_t(std::llround(0.5 * p.snr_smooth_s * dtm.frame_rate_hz));
    net = moving_average(net, half);
    std::vector<double> snr_db(net.size());
    for (std::size_t f = 0; f < net.size(); ++f)
        snr_db[f] = linear_to_db(std::max(net[f], 1e-3));
    return snr_db;
}

double doppler_to_velocity(double f_d_hz, double f0_hz) {
    if (f0_hz <= 0.0) throw std::invalid_argument("f0 must be positive");
    return f_d_hz * kSpeedOfLight / (2.0 * f0_hz);
}

double velocity_to_doppler(double v_mps, double f0_hz) {
    if (f0_hz <= 0.0) throw std::invalid_argument("f0 must be positive");
    return 2.0 * v_mps * f0_hz / kSpeedOfLight;
}

}  // namespace gaitrad::dsp
