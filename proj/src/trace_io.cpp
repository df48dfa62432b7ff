#include "snstf/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace snstf {

void write_trace(std::ostream& os, const PhaseTrace& trace) {
  trace.validate();
  char buf[96];
  std::snprintf(buf, sizeof buf, "# sample_rate_hz=%.17g origin=%s\n", trace.sample_rate_hz,
                origin_name(trace.origin));
  os << buf;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9f %.12e\n", static_cast<double>(k) / trace.sample_rate_hz,
                  trace.samples[k]);
    os << buf;
  }
}

void write_trace(const std::filesystem::path& path, const PhaseTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace(os, trace);
  if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

PhaseTrace read_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trace file is empty");
  PhaseTrace t;
  char origin[16] = {};
  if (std::sscanf(line.c_str(), "# sample_rate_hz=%lf origin=%15s", &t.sample_rate_hz, origin) != 2)
    throw std::runtime_error("malformed trace header: " + line);
  try {
    t.origin = parse_origin(origin);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  if (!(t.sample_rate_hz > 0.0)) throw std::runtime_error("trace header has a non-positive sample rate");

  const double tick = 1.0 / t.sample_rate_hz;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double time = 0.0, phase = 0.0;
    if (!(ls >> time >> phase)) throw std::runtime_error("malformed trace row " + std::to_string(row));
    // Times are printed to 1 ns.
    if (std::abs(time - row * tick) > 1e-9)
      throw std::runtime_error("trace row " + std::to_string(row) + " is off the sample grid");
    t.samples.push_back(phase);
    ++row;
  }
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  return t;
}

PhaseTrace read_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_trace(is);
}

}  // namespace snstf
