#pragma once

#include <stdexcept>
#include <string>

namespace soup {

// Parse/typecheck failure with a source position.
struct SyntaxError : std::runtime_error {
    std::string file;
    int line = 0;
    int col = 0;
    SyntaxError(std::string f, int l, int c, const std::string& msg)
        : std::runtime_error(f + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          file(std::move(f)), line(l), col(c) {}
};

// Anything that makes an operation's precondition unsatisfiable
// (missing entry point, unknown callee, malformed manifest, ...).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace soup
