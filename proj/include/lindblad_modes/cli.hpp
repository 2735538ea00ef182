#pragma once

// Front-end workflows behind the lindblad-modes executable.

#include <iosfwd>
#include <string>

#include "lindblad_modes/config.hpp"
#include "lindblad_modes/verify.hpp"

namespace lindblad {

struct EvolveOutput {
    std::string csv;
    // (path, text) per requested state dump
    std::vector<std::pair<std::string, std::string>> dumps;
    std::vector<std::string> warnings;
};

// Observable CSV; method = all gives "<method>.<obs>" column groups plus
// "td.<a>-<b>" pairwise trace distances.
EvolveOutput run_evolve(const RunConfig& cfg);

// Coefficient table (entries below 1e-14 of the largest |C| omitted) and a
// "# convergence: ..." summary line.
std::string run_coeffs(const RunConfig& cfg);

// JSON timing report comparing eigenmode synthesis with the oracle.
std::string run_bench(const RunConfig& cfg);

// Machine-readable error line: {"error": <kind>, "exit_code": n, "message": ...}
std::string error_line(const std::string& kind, int code, const std::string& message);

// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lindblad
