#include "gaitrad/io/iq_file.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

namespace gaitrad::io {

namespace {

constexpr char kMagic[4] = {'G', 'W', 'I', 'Q'};
constexpr std::size_t kHeaderSize = 4 + 2 + 4 * 8 + 4 + 8 + 4;

template <typename T>
void put(std::vector<unsigned char>& buf, T value) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(const unsigned char* p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    return value;
}

}  // namespace

void write_iq(const std::string& path, const sim::IqCube& cube, const sim::RadarWaveform& wf) {
    std::vector<unsigned char> buf;
    buf.reserve(kHeaderSize + cube.data.size() * 8);
    buf.insert(buf.end(), kMagic, kMagic + 4);
    put<std::uint16_t>(buf, kIqFormatVersion);
    put<double>(buf, wf.f0_hz);
    put<double>(buf, wf.b_hz);
    put<double>(buf, wf.tc_s);
    put<double>(buf, wf.fs_hz);
    put<std::uint32_t>(buf, cube.node_id);
    put<std::uint64_t>(buf, cube.n_chirps);
    put<std::uint32_t>(buf, std::uint32_t(cube.n_samples));
    for (const cfloat& v : cube.data) {
        put<float>(buf, v.real());
        put<float>(buf, v.imag());
    }
    const std::uint32_t crc =
        std::uint32_t(::crc32(0L, buf.data(), uInt(buf.size())));
    put<std::uint32_t>(buf, crc);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write IQ file: " + path);
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw PipelineError("short write on IQ file: " + path);
}

IqRecording read_iq(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw PipelineError("cannot read IQ file: " + path);
    const std::size_t size = std::size_t(in.tellg());
    in.seekg(0);
    std::vector<unsigned char> buf(size);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(size));
    if (!in) throw PipelineError("short read on IQ file: " + path);

    if (size < kHeaderSize + 4) throw PipelineError("truncated file: header incomplete");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw PipelineError("not a GWIQ file: " + path);
    const auto version = get<std::uint16_t>(buf.data() + 4);
    if (version != kIqFormatVersion)
        throw PipelineError("unsupported format version " + std::to_string(version));

    IqRecording rec;
    std::size_t off = 6;
    rec.waveform.f0_hz = get<double>(buf.data() + off);
    rec.waveform.b_hz = get<double>(buf.data() + off + 8);
    rec.waveform.tc_s = get<double>(buf.data() + off + 16);
    rec.waveform.fs_hz = get<double>(buf.data() + off + 24);
    off += 32;
    rec.cube.node_id = get<std::uint32_t>(buf.data() + off);
    const auto n_chirps = get<std::uint64_t>(buf.data() + off + 4);
    const auto n_samples = get<std::uint32_t>(buf.data() + off + 12);
    off += 16;

    const std::size_t payload = std::size_t(n_chirps) * n_samples * 8;
    if (size < kHeaderSize + payload + 4) {
        const std::size_t avail = size > kHeaderSize ? size - kHeaderSize : 0;
        const std::size_t complete = n_samples > 0 ? avail / (std::size_t(n_samples) * 8) : 0;
        throw PipelineError("truncated file: last complete chirp " +
                            std::to_string(complete == 0 ? 0 : complete - 1) + " of " +
                            std::to_string(n_chirps));
    }

    const std::uint32_t want_crc = get<std::uint32_t>(buf.data() + kHeaderSize + payload);
    const std::uint32_t got_crc =
        std::uint32_t(::crc32(0L, buf.data(), uInt(kHeaderSize + payload)));
    if (want_crc != got_crc) throw PipelineError("checksum mismatch in " + path);

    rec.cube.n_chirps = n_chirps;
    rec.cube.n_samples = n_samples;
    rec.cube.data.resize(std::size_t(n_chirps) * n_samples);
    for (std::size_t i = 0; i < rec.cube.data.size(); ++i) {
        const float re = get<float>(buf.data() + off + 8 * i);
        const float im = get<float>(buf.data() + off + 8 * i + 4);
        rec.cube.data[i] = cfloat(re, im);
    }
    return rec;
}

}  // namespace gaitrad::io
