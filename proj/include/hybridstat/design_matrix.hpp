#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hybridstat {

// Dense n x p feature matrix, row major. All entries must be finite.
struct DesignMatrix {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> values; // n * p, row major
    std::vector<std::string> feature_names;

    DesignMatrix() = default;
    DesignMatrix(std::size_t n_rows, std::size_t n_features, std::vector<double> data,
                 std::vector<std::string> names);

    double operator()(std::size_t i, std::size_t j) const { return values[i * p + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * p + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values.data() + i * p, p);
    }

    // Copy of column j (the storage is row major).
    std::vector<double> column(std::size_t j) const;

    // Sub-matrix with the given rows, all features.
    DesignMatrix select_rows(std::span<const std::size_t> rows) const;

    // Sub-matrix with the given feature columns, all rows.
    DesignMatrix select_features(std::span<const std::size_t> features) const;
};

} // namespace hybridstat
