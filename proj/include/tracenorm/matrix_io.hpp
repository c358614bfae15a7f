#pragma once

#include <iosfwd>
#include <string>

#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// Text format: first line "rows cols", then one line per row of
/// space-separated decimal values at full round-trip precision.
void write_matrix(std::ostream& os, const Matrix& m);
void save_matrix(const std::string& path, const Matrix& m);

/// Reads exactly rows*cols finite values; throws FormatError on anything else.
Matrix read_matrix(std::istream& is);
/// Like read_matrix but also rejects trailing non-whitespace content.
Matrix load_matrix(const std::string& path);

} // namespace tracenorm
