#pragma once

// Two-column text trace files:
//   # sample_rate_hz=<rate> origin=<alice|bob>
//   <time_s> <phase_rad>
// Values are written with fixed precision so that reading a file and writing
// it again reproduces it byte for byte.

#include <filesystem>
#include <iosfwd>

#include "snstf/sensing.hpp"

namespace snstf {

void write_trace(std::ostream& os, const PhaseTrace& trace);
void write_trace(const std::filesystem::path& path, const PhaseTrace& trace);

/// Throws std::runtime_error on a malformed header, a malformed row, or a
/// time column that disagrees with the sample index.
PhaseTrace read_trace(std::istream& is);
PhaseTrace read_trace(const std::filesystem::path& path);

}  // namespace snstf
