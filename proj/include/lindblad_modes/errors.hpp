#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lindblad {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    IndexOutOfRange,
    NonHermitian,
    Parse,
    Divergence,
    TruncationStrict,
    Degeneracy,
    DimensionCap,
    Unsupported,
};

std::string_view to_string(ErrorCode code);

// Process exit code used by the CLI for each failure class.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace lindblad
