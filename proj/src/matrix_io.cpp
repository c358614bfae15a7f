#include "tracenorm/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tracenorm/errors.hpp"

namespace tracenorm {

void write_matrix(std::ostream& os, const Matrix& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j);
        }
        os << '\n';
    }
}

void save_matrix(const std::string& path, const Matrix& m) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    write_matrix(os, m);
    if (!os) throw FormatError("write to '" + path + "' failed");
}

Matrix read_matrix(std::istream& is) {
    long long rows = 0, cols = 0;
    if (!(is >> rows >> cols)) throw FormatError("matrix header: expected 'rows cols'");
    if (rows <= 0 || cols <= 0)
        throw FormatError("matrix header: dimensions must be positive, got " +
                          std::to_string(rows) + " " + std::to_string(cols));
    Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double v;
            if (!(is >> v))
                throw FormatError("matrix body: failed to read value at row " + std::to_string(i) +
                                  ", column " + std::to_string(j));
            if (!std::isfinite(v))
                throw FormatError("matrix body: non-finite value at row " + std::to_string(i) +
                                  ", column " + std::to_string(j));
            m(i, j) = v;
        }
    }
    return m;
}

Matrix load_matrix(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open '" + path + "'");
    Matrix m = read_matrix(is);
    std::string trailing;
    if (is >> trailing) throw FormatError("'" + path + "': unexpected trailing content");
    return m;
}

} // namespace tracenorm
