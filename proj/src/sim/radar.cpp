#include "gaitrad/sim/radar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gaitrad/kernels/kernels.hpp"

namespace gaitrad::sim {

namespace {
constexpr double kLn2 = 0.6931471805599453;
constexpr double kMinRange = 0.2;  // amplitude clamp when a track grazes the node
}  // namespace

void NodeGeometry::validate() const {
    if (beamwidth_deg <= 0.0 || beamwidth_deg >= 180.0)
        throw std::invalid_argument("beamwidth outside (0, 180) degrees");
    if (std::abs(boresight.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("boresight must be a unit vector");
}

void RadarWaveform::validate() const {
    if (f0_hz <= 0.0) throw std::invalid_argument("f0 must be positive");
    if (b_hz < 0.0) throw std::invalid_argument("bandwidth must be non-negative");
    if (tc_s <= 0.0 || fs_hz <= 0.0) throw std::invalid_argument("Tc and fs must be positive");
    if (samples_per_chirp() < 1) throw std::invalid_argument("fs*Tc rounds to zero samples");
}

IqCube render_iq(const ScattererTracks& tracks, const NodeGeometry& node,
                 const RadarWaveform& wf, double snr_db, std::uint64_t seed) {
    node.validate();
    wf.validate();

    IqCube cube;
    cube.node_id = node.id;
    cube.n_samples = wf.samples_per_chirp();
    cube.n_chirps = tracks.samples();
    cube.data.assign(cube.n_chirps * cube.n_samples, cfloat(0.0f, 0.0f));
    if (cube.n_chirps == 0) return cube;

    const double lambda = wf.wavelength_m();
    const double r_max = wf.b_hz > 0.0 ? wf.unambiguous_range_m()
                                       : std::numeric_limits<double>::infinity();
    const double theta_half = 0.5 * node.beamwidth_deg * kPi / 180.0;

    std::vector<cdouble> row(cube.n_samples);
    for (std::size_t m = 0; m < cube.n_chirps; ++m) {
        std::fill(row.begin(), row.end(), cdouble(0.0, 0.0));
        for (const auto& part : tracks.parts) {
            const Vec3 los = part.positions[m] - node.position;
            const double range = los.norm();
            if (range >= r_max) throw PipelineError("range exceeds sampling limit");
            const double cos_theta =
                std::clamp(los.dot(node.boresight) / std::max(range, 1e-9), -1.0, 1.0);
            const double theta = std::acos(cos_theta);
            // two-way composite pattern, -3 dB power at theta_half
            const double beam = std::exp(-0.5 * kLn2 * (theta / theta_half) * (theta / theta_half));
            const double r_eff = std::max(range, kMinRange);
            const double amp = part.reflectivity * beam / (r_eff * r_eff);
            const double fb = wf.beat_frequency_hz(range);
            const double dphase = 2.0 * kPi * fb / wf.fs_hz;
            const double phase0 = -4.0 * kPi * range / lambda;
            kernels::add_tone(row.data(), cube.n_samples, amp, phase0, dphase);
        }
        cfloat* out = cube.chirp(m);
        for (std::size_t i = 0; i < cube.n_samples; ++i)
            out[i] = cfloat(float(row[i].real()), float(row[i].imag()));
    }

    if (std::isfinite(snr_db)) apply_trial_noise(cube, snr_db, seed);
    return cube;
}

double apply_trial_noise(IqCube& cube, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
    if (cube.data.empty()) return 0.0;

    double power = 0.0;
    for (const cfloat& v : cube.data)
        power += double(v.real()) * v.real() + double(v.imag()) * v.imag();
    power /= double(cube.data.size());

    const double noise_power = power / db_to_linear(snr_db);
    const double sigma = std::sqrt(noise_power / 2.0);
    std::mt19937_64 rng(seed ^ (0xa076bc9d6eull + cube.node_id));
    std::normal_distribution<double> gauss(0.0, sigma);
    for (cfloat& v : cube.data)
        v += cfloat(float(gauss(rng)), float(gauss(rng)));
    return noise_power;
}

}  // namespace gaitrad::sim
