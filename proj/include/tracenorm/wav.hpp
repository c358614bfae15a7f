#pragma once

#include <string>

#include "tracenorm/audio.hpp"

namespace tracenorm {

/// Read a mono 16-bit signed little-endian PCM WAV file. Samples are scaled
/// to [-1, 1) and, when normalize is set, rescaled to zero mean and unit
/// variance. Multi-channel, non-PCM, or non-16-bit files are rejected with a
/// FormatError.
AudioSegment load_wav(const std::string& path, bool normalize = true);

} // namespace tracenorm
