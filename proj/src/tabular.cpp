#include "hybridstat/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hybridstat/rng.hpp"

namespace hybridstat::tabular {

namespace {

bool is_missing_token(std::string_view cell) { return cell.empty() || cell == "NA"; }

// Strict, locale-independent number parse; the whole cell must be consumed
// and the value finite. An optional leading '+' is accepted (from_chars is
// minus-only).
std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string shortest_repr(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

// ---------------------------------------------------------------------------
// Column / Table
// ---------------------------------------------------------------------------

bool Column::any_missing() const {
    return std::any_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; });
}

Column Column::numeric(std::vector<double> values, std::vector<std::uint8_t> missing_mask) {
    Column c;
    c.kind = ColumnKind::numeric;
    if (missing_mask.empty()) missing_mask.assign(values.size(), 0);
    c.numbers = std::move(values);
    c.missing = std::move(missing_mask);
    return c;
}

Column Column::categorical(std::vector<std::string> values, std::vector<std::uint8_t> missing_mask) {
    Column c;
    c.kind = ColumnKind::categorical;
    if (missing_mask.empty()) missing_mask.assign(values.size(), 0);
    c.labels = std::move(values);
    c.missing = std::move(missing_mask);
    return c;
}

Table::Table(std::vector<std::string> names, std::vector<Column> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size())
        throw DataError(errc::inconsistent_width, "column name count does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw DataError(errc::empty_header, "column name is empty");
        if (!seen.insert(name).second)
            throw DataError(errc::duplicate_header, "duplicate column name '" + name + "'");
    }
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const Column& c = columns_[i];
        if (c.size() != n_rows_ || c.missing.size() != n_rows_)
            throw DataError(errc::inconsistent_width,
                            "column '" + names_[i] + "' has inconsistent length");
        if (c.kind == ColumnKind::numeric) {
            for (std::size_t r = 0; r < n_rows_; ++r)
                if (!c.is_missing(r) && !std::isfinite(c.numbers[r]))
                    throw DataError(errc::inconsistent_width,
                                    "non-finite value in numeric column '" + names_[i] + "'");
        }
    }
}

std::size_t Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw DataError(errc::missing_column, "no column named '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> out;
    out.reserve(columns_.size());
    for (const Column& c : columns_) {
        Column nc;
        nc.kind = c.kind;
        nc.missing.reserve(rows.size());
        if (c.kind == ColumnKind::numeric) nc.numbers.reserve(rows.size());
        else nc.labels.reserve(rows.size());
        for (const std::size_t r : rows) {
            if (r >= n_rows_) throw DataError(errc::index_out_of_range, "row index out of range");
            nc.missing.push_back(c.missing[r]);
            if (c.kind == ColumnKind::numeric) nc.numbers.push_back(c.numbers[r]);
            else nc.labels.push_back(c.labels[r]);
        }
        out.push_back(std::move(nc));
    }
    return Table(names_, std::move(out));
}

bool Table::operator==(const Table& other) const {
    if (names_ != other.names_ || n_rows_ != other.n_rows_) return false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const Column& a = columns_[i];
        const Column& b = other.columns_[i];
        if (a.kind != b.kind || a.missing != b.missing) return false;
        if (a.kind == ColumnKind::numeric) {
            if (a.numbers.size() != b.numbers.size()) return false;
            for (std::size_t r = 0; r < a.numbers.size(); ++r) {
                if (a.missing[r]) continue;
                if (a.numbers[r] != b.numbers[r]) return false;
            }
        } else if (a.labels != b.labels) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

// One pass state machine over the buffer; quoted fields may span lines.
std::vector<std::vector<std::string>> tokenize_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            record_started = true;
            break;
        case ',':
            end_field();
            record_started = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(c);
            field_started = true;
            record_started = true;
            break;
        }
    }
    if (in_quotes) throw DataError(errc::ragged_row, "unterminated quoted field at end of input");
    if (record_started || field_started || !record.empty()) end_record();
    return records;
}

} // namespace

Table parse_csv(std::string_view text, bool header) {
    auto records = tokenize_csv(text);
    if (records.empty()) throw DataError(errc::empty_input, "CSV input has no rows");

    const std::size_t width = records.front().size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw DataError(errc::ragged_row,
                            "row " + std::to_string(r + 1) + " has " +
                                std::to_string(records[r].size()) + " fields, expected " +
                                std::to_string(width));
        }
    }

    std::vector<std::string> names;
    std::size_t first_data = 0;
    if (header) {
        names = records.front();
        first_data = 1;
    } else {
        names.reserve(width);
        for (std::size_t j = 0; j < width; ++j) names.push_back("c" + std::to_string(j));
    }

    const std::size_t n = records.size() - first_data;
    std::vector<Column> columns;
    columns.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
        std::vector<std::uint8_t> missing(n, 0);
        std::vector<double> numbers(n, 0.0);
        bool all_numeric = true;
        for (std::size_t r = 0; r < n; ++r) {
            const std::string& cell = records[first_data + r][j];
            if (is_missing_token(cell)) {
                missing[r] = 1;
                continue;
            }
            if (const auto v = parse_number(cell)) numbers[r] = *v;
            else { all_numeric = false; break; }
        }
        if (all_numeric) {
            columns.push_back(Column::numeric(std::move(numbers), std::move(missing)));
        } else {
            std::vector<std::string> labels(n);
            for (std::size_t r = 0; r < n; ++r) {
                const std::string& cell = records[first_data + r][j];
                if (is_missing_token(cell)) missing[r] = 1;
                else labels[r] = cell;
            }
            columns.push_back(Column::categorical(std::move(labels), std::move(missing)));
        }
    }
    return Table(std::move(names), std::move(columns));
}

Table load_csv(const std::filesystem::path& path, bool header) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError(errc::file_not_found, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), header);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (j) out << ',';
        out << csv_escape(table.column_name(j));
    }
    out << '\n';
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t j = 0; j < table.n_cols(); ++j) {
            if (j) out << ',';
            const Column& c = table.column(j);
            if (c.is_missing(r)) continue; // empty cell marks missing
            if (c.kind == ColumnKind::numeric) out << shortest_repr(c.numbers[r]);
            else out << csv_escape(c.labels[r]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Preprocessor
// ---------------------------------------------------------------------------

Preprocessor Preprocessor::fit(const Table& table, std::span<const std::string> passthrough) {
    Preprocessor prep;
    prep.passthrough_.assign(passthrough.begin(), passthrough.end());
    const auto is_passthrough = [&](const std::string& name) {
        return std::find(prep.passthrough_.begin(), prep.passthrough_.end(), name) !=
               prep.passthrough_.end();
    };

    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        const std::string& name = table.column_name(j);
        prep.fitted_columns_.push_back(name);
        if (is_passthrough(name)) continue;
        const Column& c = table.column(j);
        if (c.kind == ColumnKind::numeric) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < c.numbers.size(); ++r) {
                if (c.is_missing(r)) continue;
                sum += c.numbers[r];
                ++count;
            }
            if (count == 0)
                throw DataError(errc::all_missing_column,
                                "column '" + name + "' has no observed values to impute from");
            prep.numeric_[name] = NumericStats{sum / static_cast<double>(count)};
        } else {
            std::map<std::string, std::size_t> freq;
            for (std::size_t r = 0; r < c.labels.size(); ++r)
                if (!c.is_missing(r)) ++freq[c.labels[r]];
            if (freq.empty())
                throw DataError(errc::all_missing_column,
                                "column '" + name + "' has no observed values to impute from");
            CategoricalStats stats;
            std::size_t best = 0;
            for (const auto& [level, count] : freq) {
                stats.levels.push_back(level); // std::map iterates lexicographically
                if (count > best) { // ties keep the earlier (lexicographically smaller) level
                    best = count;
                    stats.mode = level;
                }
            }
            prep.categorical_[name] = std::move(stats);
        }
    }
    return prep;
}

Table Preprocessor::transform(const Table& table) const {
    std::vector<std::string> names;
    std::vector<Column> columns;
    const std::size_t n = table.n_rows();

    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        const std::string& name = table.column_name(j);
        const Column& c = table.column(j);

        if (std::find(passthrough_.begin(), passthrough_.end(), name) != passthrough_.end()) {
            names.push_back(name);
            columns.push_back(c);
            continue;
        }

        if (const auto it = numeric_.find(name); it != numeric_.end()) {
            if (c.kind != ColumnKind::numeric)
                throw DataError(errc::inconsistent_width,
                                "column '" + name + "' changed type since fitting");
            std::vector<double> filled = c.numbers;
            for (std::size_t r = 0; r < n; ++r)
                if (c.is_missing(r)) filled[r] = it->second.mean;
            names.push_back(name);
            columns.push_back(Column::numeric(std::move(filled)));
            continue;
        }

        const auto it = categorical_.find(name);
        if (it == categorical_.end())
            throw DataError(errc::missing_column, "column '" + name + "' was not seen at fit time");
        if (c.kind != ColumnKind::categorical)
            throw DataError(errc::inconsistent_width,
                            "column '" + name + "' changed type since fitting");
        for (const std::string& level : it->second.levels) {
            std::vector<double> indicator(n, 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                const std::string& value = c.is_missing(r) ? it->second.mode : c.labels[r];
                indicator[r] = (value == level) ? 1.0 : 0.0;
            }
            names.push_back(name + "=" + level);
            columns.push_back(Column::numeric(std::move(indicator)));
        }
    }
    return Table(std::move(names), std::move(columns));
}

nlohmann::ordered_json Preprocessor::to_json() const {
    nlohmann::ordered_json j;
    j["numeric_means"] = nlohmann::ordered_json::object();
    for (const auto& [name, stats] : numeric_) j["numeric_means"][name] = stats.mean;
    j["categorical"] = nlohmann::ordered_json::object();
    for (const auto& [name, stats] : categorical_) {
        j["categorical"][name] = {{"mode", stats.mode}, {"levels", stats.levels}};
    }
    return j;
}

Table preprocess(const Table& table) { return Preprocessor::fit(table).transform(table); }

// ---------------------------------------------------------------------------
// Min-max scaling
// ---------------------------------------------------------------------------

const ScalerParams::Entry* ScalerParams::find(std::string_view column) const {
    for (const Entry& e : entries)
        if (e.column == column) return &e;
    return nullptr;
}

nlohmann::ordered_json ScalerParams::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Entry& e : entries)
        arr.push_back({{"column", e.column}, {"min", e.min}, {"max", e.max}});
    return arr;
}

ScalerParams ScalerParams::from_json(const nlohmann::ordered_json& j) {
    ScalerParams params;
    for (const auto& item : j)
        params.entries.push_back(Entry{item.at("column").get<std::string>(),
                                       item.at("min").get<double>(),
                                       item.at("max").get<double>()});
    return params;
}

namespace {

Column scale_column(const Column& c, const std::string& name, double min, double max) {
    if (c.kind != ColumnKind::numeric)
        throw DataError(errc::inconsistent_width, "column '" + name + "' is not numeric");
    if (c.any_missing())
        throw DataError(errc::all_missing_column,
                        "column '" + name + "' has missing cells; impute before scaling");
    const double range = max - min;
    std::vector<double> scaled(c.numbers.size());
    for (std::size_t r = 0; r < c.numbers.size(); ++r) scaled[r] = (c.numbers[r] - min) / range;
    return Column::numeric(std::move(scaled));
}

} // namespace

std::pair<Table, ScalerParams> normalize_minmax(const Table& table,
                                                std::span<const std::string> columns) {
    ScalerParams params;
    std::vector<std::string> names(table.column_names());
    std::vector<Column> out;
    out.reserve(table.n_cols());
    for (std::size_t j = 0; j < table.n_cols(); ++j) out.push_back(table.column(j));

    for (const std::string& name : columns) {
        const std::size_t j = table.column_index(name);
        const Column& c = table.column(j);
        if (c.kind != ColumnKind::numeric)
            throw DataError(errc::inconsistent_width, "column '" + name + "' is not numeric");
        if (c.any_missing())
            throw DataError(errc::all_missing_column,
                            "column '" + name + "' has missing cells; impute before scaling");
        if (c.numbers.empty())
            throw DataError(errc::empty_input, "column '" + name + "' is empty");
        const auto [lo, hi] = std::minmax_element(c.numbers.begin(), c.numbers.end());
        if (*lo == *hi)
            throw DataError(errc::constant_column,
                            "column '" + name + "' is constant (min == max == " +
                                std::to_string(*lo) + "); min-max scaling is undefined");
        params.entries.push_back(ScalerParams::Entry{name, *lo, *hi});
        out[j] = scale_column(c, name, *lo, *hi);
    }
    return {Table(std::move(names), std::move(out)), std::move(params)};
}

Table apply_minmax(const Table& table, const ScalerParams& params) {
    std::vector<std::string> names(table.column_names());
    std::vector<Column> out;
    out.reserve(table.n_cols());
    for (std::size_t j = 0; j < table.n_cols(); ++j) out.push_back(table.column(j));
    for (const ScalerParams::Entry& e : params.entries) {
        const std::size_t j = table.column_index(e.column);
        out[j] = scale_column(table.column(j), e.column, e.min, e.max);
    }
    return Table(std::move(names), std::move(out));
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const Table& table, const SplitSpec& spec) {
    const std::size_t n = table.n_rows();
    if (n < 2) throw DataError(errc::empty_input, "need at least 2 rows to split");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ConfigError(errc::invalid_spec, "train_fraction must lie strictly in (0, 1)");

    Rng rng(spec.seed);
    std::vector<std::size_t> train;
    const std::size_t total_train =
        static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));

    if (!spec.stratify_on) {
        const auto perm = rng.permutation(n);
        train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(total_train));
    } else {
        const Column& strat = table.column(*spec.stratify_on);
        if (strat.kind != ColumnKind::categorical)
            throw DataError(errc::inconsistent_width,
                            "stratify_on column '" + *spec.stratify_on + "' must be categorical");
        if (strat.any_missing())
            throw DataError(errc::all_missing_column,
                            "stratify_on column '" + *spec.stratify_on + "' has missing cells");

        std::map<std::string, std::vector<std::size_t>> classes; // lexicographic class order
        for (std::size_t r = 0; r < n; ++r) classes[strat.labels[r]].push_back(r);
        for (const auto& [label, rows] : classes)
            if (rows.size() < 2)
                throw DataError(errc::class_too_small,
                                "class '" + label + "' has only " + std::to_string(rows.size()) +
                                    " row(s); cannot stratify");

        // Largest-remainder allocation: per-class floor(fraction * n_c), then
        // hand out the remaining slots (up to floor(fraction * n)) by
        // descending fractional quota, ties by class order.
        struct Alloc {
            const std::vector<std::size_t>* rows;
            std::size_t base;
            double remainder;
            std::size_t order;
        };
        std::vector<Alloc> allocs;
        std::size_t allocated = 0;
        std::size_t order = 0;
        for (const auto& [label, rows] : classes) {
            const double quota = spec.train_fraction * static_cast<double>(rows.size());
            const std::size_t base = static_cast<std::size_t>(std::floor(quota));
            allocs.push_back(Alloc{&rows, base, quota - std::floor(quota), order++});
            allocated += base;
        }
        std::size_t leftover = total_train > allocated ? total_train - allocated : 0;
        std::vector<std::size_t> by_remainder(allocs.size());
        for (std::size_t i = 0; i < allocs.size(); ++i) by_remainder[i] = i;
        std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
            return allocs[a].remainder > allocs[b].remainder;
        });
        for (std::size_t i = 0; i < by_remainder.size() && leftover > 0; ++i) {
            Alloc& a = allocs[by_remainder[i]];
            if (a.base < a.rows->size()) {
                ++a.base;
                --leftover;
            }
        }
        // Shuffle each class with the shared stream, consumed in class order.
        for (Alloc& a : allocs) {
            std::vector<std::size_t> rows = *a.rows;
            rng.shuffle(rows);
            train.insert(train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(a.base));
        }
    }

    std::sort(train.begin(), train.end());
    std::vector<std::size_t> test;
    test.reserve(n - train.size());
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (cursor < train.size() && train[cursor] == r) ++cursor;
        else test.push_back(r);
    }
    return {std::move(train), std::move(test)};
}

std::pair<Table, Table> split_train_test(const Table& table, const SplitSpec& spec) {
    const auto [train_idx, test_idx] = split_indices(table, spec);
    return {table.select_rows(train_idx), table.select_rows(test_idx)};
}

} // namespace hybridstat::tabular
