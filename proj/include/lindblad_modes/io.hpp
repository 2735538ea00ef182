#pragma once

// CSV observable export and full-state dumps. Output is locale independent.

#include <iosfwd>
#include <string>
#include <vector>

#include "lindblad_modes/evolution.hpp"

namespace lindblad {

// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for non-finite).
std::string format_double(double v);

// Header "t,<col>..." with complex columns written as <col>_re,<col>_im.
void write_csv(std::ostream& out, const ObservableTable& table);

// One block per time point: lines "t i j re im" for every entry, blank line between blocks.
void write_state_dump(std::ostream& out, const EvolutionResult& result);

// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

} // namespace lindblad
