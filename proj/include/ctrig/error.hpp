#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctrig {

enum class ErrorCode {
    ConstantSeries,
    InvalidPanel,
    LagTooLarge,
    UnknownVariable,
    EmptyDesign,
    DimensionMismatch,
    TooFewSamples,
    SingularDesign,
    DegreesOfFreedom,
    TooManyVariables,
    IntervalTooShort,
    SeriesTooShort,
    EmptyRange,
    NoEligibleCause,
    UnstableSystem,
    InvalidScenario,
    InvalidArgument,
    SchemaError,
    NonUniformSampling,
    MissingComponent,
    IoError,
    ConfigError,
};

/// Stable machine-readable identifier, e.g. "constant-series".
std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the grid runner, the CLI) can report it without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ctrig
