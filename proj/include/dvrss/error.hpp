#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dvrss {

// Every contract violation carries a stable machine-readable code next to the
// human message, so callers (and the CLI) can switch on it.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(msg), code(std::move(c)) {}
};

[[noreturn]] inline void fail(std::string code, const std::string& msg)
{
    throw Error(std::move(code), msg);
}

inline void require(bool ok, const char* code, const std::string& msg)
{
    if (!ok)
        fail(code, msg);
}

}  // namespace dvrss
