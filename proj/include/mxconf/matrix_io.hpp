#pragma once

#include "mxconf/matrix_core.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace mxconf {

/// Thrown for malformed CSV input; carries the 1-based location of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t field)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", field " +
                             std::to_string(field) + ")"),
          line_(line), field_(field) {}
    std::size_t line() const { return line_; }
    std::size_t field() const { return field_; }

private:
    std::size_t line_;
    std::size_t field_;
};

/// Pairs whose values differ by more than this are rejected as asymmetric.
inline constexpr double kSymmetryTolerance = 1e-9;

/**
 * Reads a square comma-separated matrix. Empty fields and `NA` are missing.
 * Asymmetry within kSymmetryTolerance is removed by averaging the two mirrored
 * values; anything larger, or a missing value mirrored by an observed one, is
 * an error.
 */
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv_file(const std::string& path);

/// Writes `NA` for missing entries and shortest round-trip decimals otherwise.
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace mxconf
