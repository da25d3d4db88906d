#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isosector {

enum class ErrorKind {
    NonFiniteSample,
    DegenerateGrid,
    NonPositiveInput,
    ZeroExponent,
    OutOfDomain,
    QuadratureFailure,
    MonotonicityViolation,
    BracketFailure,
    NonPositiveFunction,
    ParamOutOfRange,
    BiteSolveFailure,
    AreaUnattainable,
    NoTransition,
    NonFiniteProfile,
    OriginInside,
    VolumeUnattainable,
    GridTooCoarse,
    MaxIterations,
    CollapseDetected,
    AllStartsFailed,
    IoFailure,
    UnsupportedFormat,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::DegenerateGrid: return "DegenerateGrid";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::ZeroExponent: return "ZeroExponent";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NonPositiveFunction: return "NonPositiveFunction";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::BiteSolveFailure: return "BiteSolveFailure";
    case ErrorKind::AreaUnattainable: return "AreaUnattainable";
    case ErrorKind::NoTransition: return "NoTransition";
    case ErrorKind::NonFiniteProfile: return "NonFiniteProfile";
    case ErrorKind::OriginInside: return "OriginInside";
    case ErrorKind::VolumeUnattainable: return "VolumeUnattainable";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::CollapseDetected: return "CollapseDetected";
    case ErrorKind::AllStartsFailed: return "AllStartsFailed";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    }
    return "Unknown";
}

// Domain failure raised by every numeric routine in the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace isosector
