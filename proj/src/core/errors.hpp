// errors.hpp -- error taxonomy shared by the core and the C API boundary
#pragma once

#include <stdexcept>
#include <string>

namespace nlch {

enum class ErrorKind {
    invalid,  // bad arguments, domain violations, config problems
    numeric,  // solver non-convergence, step abort
    io        // file format / filesystem problems
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) { throw Error(ErrorKind::invalid, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrorKind::numeric, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::io, msg); }

} // namespace nlch
