#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sme {

enum class ErrorKind {
    InvalidArgument,
    SingularSystem,
    SingularB,
    EigensolverFailure,
    UnphysicalState,
    NanDetected,
    NoCrossing,
    NoSteadyState,
    StiffSource,
    CacheFormat,
};

std::string_view to_string(ErrorKind kind);

/// Exception type used throughout the library. The kind lets callers (the CLI
/// in particular) map failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace sme
