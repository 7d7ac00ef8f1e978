#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maskit {

enum class ErrorKind {
    parse,
    domain,
    no_parents,
    resource_cap,
    singular,
    no_convergence,
    escaped,
    continuation,
    branch,
    not_localized,
    cusp_not_found,
    io,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::domain: return "domain";
    case ErrorKind::no_parents: return "no_parents";
    case ErrorKind::resource_cap: return "resource_cap";
    case ErrorKind::singular: return "singular";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::escaped: return "escaped";
    case ErrorKind::continuation: return "continuation";
    case ErrorKind::branch: return "branch";
    case ErrorKind::not_localized: return "not_localized";
    case ErrorKind::cusp_not_found: return "cusp_not_found";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace maskit
