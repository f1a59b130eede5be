#pragma once

#include <stdexcept>
#include <string>

namespace qes {

enum class ErrorKind {
    domain,
    pole,
    divergence,
    invalid_params,
    singular_point,
    index,
    pivot,
    non_convergence,
    degenerate,
    dimension,
    regime,
    off_spectrum,
    truncation,
    config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qes
