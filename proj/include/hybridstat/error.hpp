#pragma once

#include <stdexcept>
#include <string>

namespace hybridstat {

// Error taxonomy. Every library failure carries a stable code so callers
// (and the CLI exit-code mapping) can react without parsing messages.
enum class errc {
    // data / ingestion
    file_not_found,
    ragged_row,
    duplicate_header,
    empty_header,
    all_missing_column,
    constant_column,
    class_too_small,
    missing_target,
    // fitting
    dimension_mismatch,
    single_class_target,
    empty_lambda_list,
    invalid_lambda_grid,
    empty_node,
    too_many_features,
    index_out_of_range,
    // evaluation
    k_out_of_range,
    fold_plan_mismatch,
    too_few_residuals,
    zero_variance_residuals,
    empty_input,
    inconsistent_width,
    // pipeline / config
    invalid_spec,
    invalid_config,
    incompatible_task,
    all_features_eliminated,
    missing_column,
    io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

// Bad input data or a numerically impossible request. CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

// Bad configuration (config file, spec fields, hyperparameters). CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem failures while reading inputs or emitting reports. CLI exit code 3.
class IoError : public Error {
public:
    IoError(const std::string& message) : Error(errc::io_error, message) {}
};

} // namespace hybridstat
