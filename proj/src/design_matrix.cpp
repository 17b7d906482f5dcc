#include "hybridstat/design_matrix.hpp"

#include <cmath>

#include "hybridstat/error.hpp"

namespace hybridstat {

DesignMatrix::DesignMatrix(std::size_t n_rows, std::size_t n_features, std::vector<double> data,
                           std::vector<std::string> names)
    : n(n_rows), p(n_features), values(std::move(data)), feature_names(std::move(names)) {
    if (values.size() != n * p)
        throw DataError(errc::dimension_mismatch,
                        "design matrix storage size " + std::to_string(values.size()) +
                            " does not match " + std::to_string(n) + "x" + std::to_string(p));
    if (!feature_names.empty() && feature_names.size() != p)
        throw DataError(errc::dimension_mismatch, "feature name count does not match p");
    if (feature_names.empty()) {
        feature_names.reserve(p);
        for (std::size_t j = 0; j < p; ++j) feature_names.push_back("f" + std::to_string(j));
    }
    for (const double v : values)
        if (!std::isfinite(v))
            throw DataError(errc::dimension_mismatch, "design matrix contains non-finite entries");
}

std::vector<double> DesignMatrix::column(std::size_t j) const {
    if (j >= p) throw DataError(errc::index_out_of_range, "feature index out of range");
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = values[i * p + j];
    return col;
}

DesignMatrix DesignMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> data;
    data.reserve(rows.size() * p);
    for (const std::size_t r : rows) {
        if (r >= n) throw DataError(errc::index_out_of_range, "row index out of range");
        data.insert(data.end(), values.begin() + static_cast<std::ptrdiff_t>(r * p),
                    values.begin() + static_cast<std::ptrdiff_t>((r + 1) * p));
    }
    return DesignMatrix(rows.size(), p, std::move(data), feature_names);
}

DesignMatrix DesignMatrix::select_features(std::span<const std::size_t> features) const {
    std::vector<double> data;
    data.reserve(n * features.size());
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const std::size_t f : features) {
        if (f >= p) throw DataError(errc::index_out_of_range, "feature index out of range");
        names.push_back(feature_names[f]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (const std::size_t f : features) data.push_back(values[i * p + f]);
    return DesignMatrix(n, features.size(), std::move(data), std::move(names));
}

} // namespace hybridstat
