#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vaep {

/// Dense row-major feature matrix with named columns.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::size_t rows = 0;
    std::vector<double> values;

    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> cols, std::size_t n_rows)
        : columns(std::move(cols)), rows(n_rows), values(rows * columns.size(), 0.0) {}

    std::size_t cols() const { return columns.size(); }
    double& at(std::size_t r, std::size_t c) { return values[r * columns.size() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * columns.size() + c]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * columns.size(), columns.size()};
    }

    /// Rows selected by index, in the given order.
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
};

void write_matrix_csv(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_matrix_csv(std::istream& in);

} // namespace vaep
