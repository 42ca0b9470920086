#pragma once

#include <stdexcept>
#include <string>

namespace loss {

/// Error classes; values double as C API status codes.
enum class ErrorCode : int {
    usage = 1,
    config = 2,
    io = 3,
    numeric = 4,
    horizon = 5,
    layout = 6,
    exchange = 7,
    domain = 8,
    dimension = 9,
    internal = 99,
};

const char* error_class_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what)
{
    if (!ok)
        throw Error(code, what);
}

} // namespace loss
