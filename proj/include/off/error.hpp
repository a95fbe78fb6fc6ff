#ifndef OFF_ERROR_HPP
#define OFF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace off {

enum class ErrorCode {
    MissingColumn,
    NonNumericCell,
    NaInBaseFeature,
    AlreadyMissing,
    EmptySplit,
    DegenerateLabels,
    Singular,
    DimensionMismatch,
    InsufficientSubset,
    UnknownSubset,
    NonBinaryFeature,
    ZeroMassEvent,
    EmptyDataset,
    SingleClass,
    NoMissingRows,
    InvalidArgument,
    Io,
    Config,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

    // Config problems map to exit code 2 in the CLI, everything else is a data error.
    bool is_config_error() const noexcept { return code_ == ErrorCode::Config; }

private:
    ErrorCode code_;
};

} // namespace off

#endif // OFF_ERROR_HPP
