#pragma once

#include <cstdint>
#include <vector>

#include "gaitrad/common.hpp"
#include "gaitrad/sim/walker.hpp"

namespace gaitrad::sim {

enum class NodeFocus { Torso, Feet };

struct NodeGeometry {
    std::uint32_t id = 0;
    Vec3 position{0.0, 0.0, 1.0};
    Vec3 boresight{1.0, 0.0, 0.0};  // unit vector
    double beamwidth_deg = 40.0;    // -3 dB (power) full width
    NodeFocus focus = NodeFocus::Torso;

    void validate() const;
};

struct RadarWaveform {
    double f0_hz = 23.0e9;
    double b_hz = 1.4e9;
    double tc_s = 625e-6;
    double fs_hz = 204.8e3;

    std::size_t samples_per_chirp() const {
        return std::size_t(std::llround(fs_hz * tc_s));
    }
    double chirp_rate_hz() const { return 1.0 / tc_s; }
    double wavelength_m() const { return kSpeedOfLight / f0_hz; }
    double range_resolution_m() const { return kSpeedOfLight / (2.0 * b_hz); }
    // Largest range whose beat frequency stays inside the complex sampling band.
    double unambiguous_range_m() const {
        return fs_hz * kSpeedOfLight * tc_s / (2.0 * b_hz);
    }
    double beat_frequency_hz(double range_m) const {
        return 2.0 * range_m * b_hz / (kSpeedOfLight * tc_s);
    }
    void validate() const;
};

// One node's recording: chirps x samples_per_chirp, complex baseband.
struct IqCube {
    std::uint32_t node_id = 0;
    std::size_t n_chirps = 0;
    std::size_t n_samples = 0;
    std::vector<cfloat> data;  // chirp-major

    const cfloat* chirp(std::size_t m) const { return data.data() + m * n_samples; }
    cfloat* chirp(std::size_t m) { return data.data() + m * n_samples; }
};

// Renders the scatterer tracks into beat-frequency IQ data under the
// stop-and-go approximation: within chirp m each scatterer at range R
// contributes a tone at 2*R*B/(c*Tc) with chirp-to-chirp phase -4*pi*R/lambda
// (so approaching targets land on positive Doppler), weighted by 1/R^2 and a
// Gaussian beam pattern that is -3 dB (power) at half the beamwidth.
// Complex white Gaussian noise is added at snr_db relative to the rendered
// mean signal power; pass +infinity to disable it.
IqCube render_iq(const ScattererTracks& tracks, const NodeGeometry& node,
                 const RadarWaveform& wf, double snr_db, std::uint64_t seed = 0);

// Adds complex white Gaussian noise at snr_db relative to the cube's current
// mean power. Returns the noise power actually added.
double apply_trial_noise(IqCube& cube, double snr_db, std::uint64_t seed = 0);

}  // namespace gaitrad::sim
