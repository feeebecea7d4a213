#pragma once

#include <stdexcept>
#include <string>

namespace asmpc {

// Base for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition or shape contract was violated by the caller.
struct ContractError : Error {
    explicit ContractError(const std::string& what) : Error(what) {}
};

// A computation produced NaN/Inf or left the representable range.
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(what) {}
};

// Integration or optimization diverged; carries context in the message
// (and, where the owning module defines it, the last finite iterate).
struct DivergenceError : Error {
    explicit DivergenceError(const std::string& what) : Error(what) {}
};

}  // namespace asmpc
