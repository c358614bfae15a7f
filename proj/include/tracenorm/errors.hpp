#pragma once

#include <stdexcept>

namespace tracenorm {

/// Shape disagreement between operands or against a stored accumulator.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed file or stream contents (matrix text, model file, manifest, WAV).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative numerical routine failed to reach its tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tracenorm
