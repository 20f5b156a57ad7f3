#include "mxconf/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace mxconf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view field, std::size_t line, std::size_t column) {
    field = trim(field);
    if (field.empty() || field == "NA") return kMissing;
    if (field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError("not a number: '" + std::string(field) + "'", line, column);
    }
    return value;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t field_no = 1;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_field(rest.substr(0, comma), line_no, field_no));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
            ++field_no;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("expected " + std::to_string(rows.front().size()) + " fields, found " +
                                 std::to_string(row.size()),
                             line_no, row.size());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix", line_no, 0);
    const auto order = static_cast<Index>(rows.size());
    if (static_cast<Index>(rows.front().size()) != order) {
        throw ParseError("matrix is not square: " + std::to_string(order) + " rows, " +
                             std::to_string(rows.front().size()) + " columns",
                         1, rows.front().size());
    }

    Matrix m(order, order);
    for (Index i = 0; i < order; ++i) {
        for (Index j = 0; j < order; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    for (Index i = 0; i < order; ++i) {
        for (Index j = i + 1; j < order; ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (std::isnan(a) != std::isnan(b)) {
                throw ParseError("missing value is not mirrored at (" + std::to_string(j + 1) + ", " +
                                     std::to_string(i + 1) + ")",
                                 static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1));
            }
            if (std::isnan(a)) continue;
            if (std::abs(a - b) > kSymmetryTolerance) {
                throw ParseError("matrix is not symmetric: " + std::to_string(a) + " vs " +
                                     std::to_string(b) + " at the mirrored position",
                                 static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1));
            }
            const double mean = 0.5 * (a + b);
            m(i, j) = mean;
            m(j, i) = mean;
        }
    }
    return m;
}

Matrix read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    char buf[64];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            const double v = m(i, j);
            if (std::isnan(v)) {
                out << "NA";
            } else {
                const auto res = std::to_chars(buf, buf + sizeof buf, v);
                out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
            }
        }
        out << '\n';
    }
}

}  // namespace mxconf
