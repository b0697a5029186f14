#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subriem {

enum class ErrorKind {
    parse,            // malformed expression / config text
    domain,           // evaluation outside the function's domain
    order_exhausted,  // derivative request beyond the configured jet order
    numeric,          // singular system, conjugate point, step underflow
    config,           // bad run configuration or model file
    verification,     // a verify suite failed
};

class Error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Error(ErrorKind kind, const std::string& msg, std::size_t offset = npos)
        : std::runtime_error(offset == npos ? msg : msg + " at offset " + std::to_string(offset)),
          kind_(kind),
          offset_(offset) {}

    ErrorKind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    ErrorKind kind_;
    std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg,
                              std::size_t offset = Error::npos) {
    throw Error(kind, msg, offset);
}

}  // namespace subriem
