#pragma once

#include <string>

#include "gaitrad/sim/radar.hpp"

namespace gaitrad::io {

// GWIQ container: little-endian header {magic "GWIQ", version u16, f0, B, Tc,
// fs as f64, node id u32, chirp count u64, samples per chirp u32}, interleaved
// float32 I/Q payload, CRC32 footer over header+payload.
inline constexpr std::uint16_t kIqFormatVersion = 1;

struct IqRecording {
    sim::IqCube cube;
    sim::RadarWaveform waveform;
};

void write_iq(const std::string& path, const sim::IqCube& cube, const sim::RadarWaveform& wf);

IqRecording read_iq(const std::string& path);

}  // namespace gaitrad::io
