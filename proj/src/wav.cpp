#include "tracenorm/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "tracenorm/errors.hpp"

namespace tracenorm {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
    return std::uint16_t(p[0] | p[1] << 8);
}

} // namespace

AudioSegment load_wav(const std::string& path, bool normalize) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw FormatError("'" + path + "': not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos +  8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::uint32_t chunk_len = read_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size())
            throw FormatError("'" + path + "': truncated chunk");
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw FormatError("'" + path + "': short fmt chunk");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) throw FormatError("'" + path + "': missing fmt or data chunk");
    if (format != 1) throw FormatError("'" + path + "': only PCM (format 1) is supported");
    if (channels != 1) throw FormatError("'" + path + "': only mono files are supported");
    if (bits != 16) throw FormatError("'" + path + "': only 16-bit samples are supported");
    if (sample_rate == 0) throw FormatError("'" + path + "': zero sample rate");

    AudioSegment seg;
    seg.sample_rate = double(sample_rate);
    seg.samples.resize(data_len / 2);
    for (std::size_t i = 0; i < seg.samples.size(); ++i) {
        const std::int16_t v = std::int16_t(read_u16(data + 2 * i));
        seg.samples[i] = double(v) / 32768.0;
    }
    if (seg.samples.empty()) throw FormatError("'" + path + "': empty data chunk");
    return normalize ? normalized(std::move(seg)) : seg;
}

} // namespace tracenorm
