#pragma once

#include <stdexcept>
#include <string>

namespace potsys {

/// Structured error; `kind` tells callers whether the input was bad,
/// the expression left the supported fragment, or a guard tripped.
class Error : public std::runtime_error {
public:
    enum class Kind {
        OutsideFragment,
        Input,
        DivisionByZero,
        DepthExceeded,
        Constraint,
        Internal,
    };

    Error(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

[[noreturn]] inline void fail(Error::Kind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace potsys
