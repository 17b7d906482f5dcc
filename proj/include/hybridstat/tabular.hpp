#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridstat/error.hpp"

#include "json.hpp"

namespace hybridstat::tabular {

enum class ColumnKind { numeric, categorical };

// One typed column plus its missing-value mask. Numeric cells are finite
// doubles when present; the slot value of a missing cell is unspecified.
struct Column {
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> numbers;      // kind == numeric
    std::vector<std::string> labels;  // kind == categorical
    std::vector<std::uint8_t> missing;

    std::size_t size() const {
        return kind == ColumnKind::numeric ? numbers.size() : labels.size();
    }
    bool is_missing(std::size_t row) const { return missing[row] != 0; }
    bool any_missing() const;

    static Column numeric(std::vector<double> values, std::vector<std::uint8_t> missing_mask = {});
    static Column categorical(std::vector<std::string> values,
                              std::vector<std::uint8_t> missing_mask = {});
};

// Immutable columnar dataset. Construction validates the invariants:
// unique non-empty column names, equal column lengths, finite numeric cells.
class Table {
public:
    Table() = default;
    Table(std::vector<std::string> names, std::vector<Column> columns);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }
    const std::vector<std::string>& column_names() const { return names_; }
    const std::string& column_name(std::size_t i) const { return names_[i]; }
    const Column& column(std::size_t i) const { return columns_[i]; }
    const Column& column(std::string_view name) const { return columns_[column_index(name)]; }
    std::size_t column_index(std::string_view name) const; // throws missing-column
    bool has_column(std::string_view name) const;

    Table select_rows(std::span<const std::size_t> rows) const;

    bool operator==(const Table& other) const;

private:
    std::vector<std::string> names_;
    std::vector<Column> columns_;
    std::size_t n_rows_ = 0;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

// RFC-4180-style CSV: comma delimiter, double-quote quoting with ""
// escapes, quoted fields may contain commas and newlines, CRLF accepted.
// Empty cells and the literal token "NA" are missing. A column whose
// non-missing cells all parse as finite numbers becomes numeric, anything
// else categorical. With header=false columns are named c0, c1, ...
Table load_csv(const std::filesystem::path& path, bool header);

// Same parser on an in-memory buffer.
Table parse_csv(std::string_view text, bool header);

void write_csv(const Table& table, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Preprocessing: imputation + one-hot encoding
// ---------------------------------------------------------------------------

// Fitted preprocessing statistics, reusable on new data so held-out rows
// never contribute to imputation means or encoding level sets. Missing
// numerics are filled with the fitted column mean, missing categoricals with
// the fitted mode (ties broken lexicographically). Each categorical column
// with L levels expands to L one-hot columns "<col>=<level>" in
// lexicographic level order; levels unseen at fit time encode as all zeros.
class Preprocessor {
public:
    struct NumericStats {
        double mean = 0.0;
    };
    struct CategoricalStats {
        std::string mode;
        std::vector<std::string> levels; // sorted ascending
    };

    static Preprocessor fit(const Table& table, std::span<const std::string> passthrough = {});

    Table transform(const Table& table) const;

    const std::map<std::string, NumericStats>& numeric_stats() const { return numeric_; }
    const std::map<std::string, CategoricalStats>& categorical_stats() const {
        return categorical_;
    }

    nlohmann::ordered_json to_json() const;

private:
    std::vector<std::string> fitted_columns_; // source column order
    std::vector<std::string> passthrough_;
    std::map<std::string, NumericStats> numeric_;
    std::map<std::string, CategoricalStats> categorical_;
};

// fit + transform on the same table.
Table preprocess(const Table& table);

// ---------------------------------------------------------------------------
// Min-max scaling
// ---------------------------------------------------------------------------

// Per-column min/max captured at fit time, so the identical affine map can
// be replayed on new data. Values outside [min, max] map outside [0, 1];
// there is no clamping.
struct ScalerParams {
    struct Entry {
        std::string column;
        double min = 0.0;
        double max = 0.0;
    };
    std::vector<Entry> entries;

    const Entry* find(std::string_view column) const;
    nlohmann::ordered_json to_json() const;
    static ScalerParams from_json(const nlohmann::ordered_json& j);
};

// x' = (x - min) / (max - min) for each named column. The named columns must
// be numeric with no missing cells; a constant column (max == min) is a
// constant-column error.
std::pair<Table, ScalerParams> normalize_minmax(const Table& table,
                                                std::span<const std::string> columns);

// Replay a fitted scaler on new data.
Table apply_minmax(const Table& table, const ScalerParams& params);

// ---------------------------------------------------------------------------
// Train/test splitting
// ---------------------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.8; // strictly in (0, 1)
    std::uint64_t seed = 0;
    std::optional<std::string> stratify_on; // categorical column
};

// Seeded Fisher-Yates permutation (see rng.hpp for the generator contract);
// train size = floor(train_fraction * n). Stratified splits allocate
// floor(fraction * n_class) per class, then distribute the remainder up to
// floor(fraction * n) by largest fractional quota (ties by class order), so
// each class's train share is within one row of the requested fraction.
// Output tables keep rows in original order.
std::pair<Table, Table> split_train_test(const Table& table, const SplitSpec& spec);

// Row indices of the split, train first. Exposed so callers can reason about
// which physical rows landed where.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const Table& table,
                                                                            const SplitSpec& spec);

} // namespace hybridstat::tabular
