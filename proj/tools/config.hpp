#pragma once

// INI run configuration. One section per module block:
//   [run] [link] [detector] [source] [protocol] [security]
//   [keyrate] [curve] [optimize] [sensing] [vibration] [vibration.<name>]
// Every key is optional except inside [keyrate], where all five inputs are
// required. Unknown sections and keys are errors.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snstf/core.hpp"
#include "snstf/optimize.hpp"
#include "snstf/security.hpp"
#include "snstf/sensing.hpp"
#include "snstf/simulate.hpp"

namespace snstf::cli {

/// Bad input; mapped to exit code 2. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Valid input for which no result exists; mapped to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SimMode { expected, monte_carlo };
enum class Recovery { reference, heterodyne };

struct RunSection {
  std::string scenario = "default";
  std::uint64_t seed = 1;
  SimMode mode = SimMode::monte_carlo;
  std::uint64_t pulses = 10'000'000;  // Monte Carlo pulse count
  double n_total = 1.007e13;          // pulses assumed by expected analyses
  std::string out;                    // empty: standard output
  std::string format = "csv";
};

struct CurveSection {
  std::vector<double> distances_km;
};

struct OptimizeSection {
  long budget = 20000;
  int starts = 8;
  double around = 0.0;  // > 0: search a +/- box around [source]
};

struct SensingSection {
  LinkGeometry geometry;
  TraceSimulation simulation;
  Recovery recovery = Recovery::reference;
  double photons_per_frame = 1e4;
  double reference_bias_rad = 1.5707963267948966;
};

struct RunConfig {
  RunSection run;
  LinkModel link;
  DetectorModel det;
  SourceParams src;
  ProtocolOptions protocol;
  SecurityParams sec;
  std::optional<KeyRateReport> keyrate;
  CurveSection curve;
  OptimizeSection optimize;
  SensingSection sensing;
  std::vector<VibrationSource> vibrations;

  /// Throws ConfigError for the first block that fails its invariants.
  void validate() const;
  EvalSetup eval_setup() const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace snstf::cli
