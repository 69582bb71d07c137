#include "ctrig/error.hpp"

namespace ctrig {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConstantSeries: return "constant-series";
    case ErrorCode::InvalidPanel: return "invalid-panel";
    case ErrorCode::LagTooLarge: return "lag-too-large";
    case ErrorCode::UnknownVariable: return "unknown-variable";
    case ErrorCode::EmptyDesign: return "empty-design";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::TooFewSamples: return "too-few-samples";
    case ErrorCode::SingularDesign: return "singular-design";
    case ErrorCode::DegreesOfFreedom: return "degrees-of-freedom";
    case ErrorCode::TooManyVariables: return "too-many-variables";
    case ErrorCode::IntervalTooShort: return "interval-too-short";
    case ErrorCode::SeriesTooShort: return "series-too-short";
    case ErrorCode::EmptyRange: return "empty-range";
    case ErrorCode::NoEligibleCause: return "no-eligible-cause";
    case ErrorCode::UnstableSystem: return "unstable-system";
    case ErrorCode::InvalidScenario: return "invalid-scenario";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SchemaError: return "schema-error";
    case ErrorCode::NonUniformSampling: return "non-uniform-sampling";
    case ErrorCode::MissingComponent: return "missing-component";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::ConfigError: return "config-error";
    }
    return "unknown";
}

} // namespace ctrig
