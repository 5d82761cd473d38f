#include "vaep/matrix.hpp"

#include <istream>
#include <ostream>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(columns, indices.size());
    const std::size_t c = cols();
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i * c));
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& m) {
    out << csv::join(m.columns) << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << csv::format_double(m.at(r, c));
        }
        out << '\n';
    }
}

FeatureMatrix read_matrix_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw SchemaError("feature matrix file is empty");
    }
    FeatureMatrix m;
    m.columns = csv::split_line(line);
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() != m.cols()) {
            throw SchemaError("feature matrix line " + std::to_string(line_no) + ": expected " +
                              std::to_string(m.cols()) + " fields");
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            m.values.push_back(csv::parse_double(fields[c], m.columns[c], line_no));
        }
        ++m.rows;
    }
    return m;
}

} // namespace vaep
