#pragma once

// Vibration sensing on a bidirectional phase-tracked link: trace synthesis,
// phase recovery from reference-pulse counts, delay estimation by
// cross-correlation, and source localization.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace snstf {

enum class TraceOrigin : std::uint8_t { alice, bob };

const char* origin_name(TraceOrigin o);
TraceOrigin parse_origin(const std::string& s);

/// Uniformly sampled, unwrapped relative phase (radians).
struct PhaseTrace {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
  TraceOrigin origin = TraceOrigin::alice;

  void validate() const;
  double duration_s() const { return samples.size() / sample_rate_hz; }
};

struct LinkGeometry {
  double length_km = 500.0;
  double light_speed_km_per_s = 2.0e5;

  void validate() const;
  double transit_s() const { return length_km / light_speed_km_per_s; }
};

struct Sinusoid {
  double frequency_hz = 1.0;
  double amplitude_rad = 1.0;
  double phase_rad = 0.0;
};

struct DcPlusSinusoid {
  double offset_rad = 1.0;
  double frequency_hz = 1000.0;
  double amplitude_rad = 0.5;
};

using Waveform = std::variant<Sinusoid, DcPlusSinusoid>;

/// Fiber stretcher at a point on the link, active on [start_s, start_s + duration_s).
struct VibrationSource {
  double position_km = 0.0;
  Waveform waveform = Sinusoid{};
  double start_s = 0.0;
  double duration_s = 1.0;

  void validate(const LinkGeometry& geom) const;
  double frequency_hz() const;
  /// Phase imprinted at local time t.
  double value_at(double t) const;
};

struct TracePair {
  PhaseTrace alice;  // light travelling Bob -> Alice
  PhaseTrace bob;    // light travelling Alice -> Bob
};

struct TraceSimulation {
  double sample_rate_hz = 200e3;
  double duration_s = 1.0;
  double drift_rate = 0.0;  // rad^2/s of the common Wiener drift
  double noise_rad = 0.0;   // white measurement noise per sample
  std::uint64_t seed = 1;
};

/// Throws std::invalid_argument when a source would alias or sits off the link.
TracePair simulate_phase_traces(const LinkGeometry& geom, std::span<const VibrationSource> sources,
                                const TraceSimulation& sim);

struct FrameCounts {
  std::uint64_t left = 0;
  std::uint64_t right = 0;
};

/// Forward model of the reference-pulse interference: per frame, Poisson
/// counts with means N cos^2(phi/2) and N sin^2(phi/2).
std::vector<FrameCounts> synthesize_reference_counts(std::span<const double> phase,
                                                     double photons_per_frame, std::uint64_t seed);

/// Per-frame arccos estimate, with the sign fold and 2 pi wraps resolved by
/// tracking continuity. Defined up to a global sign and 2 pi offset.
PhaseTrace recover_phase_from_reference(std::span<const FrameCounts> frames, double frame_rate_hz,
                                        TraceOrigin origin = TraceOrigin::alice);

/// Raised when a trace has no variance after detrending.
class DegenerateTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DelayEstimate {
  double delay_s = 0.0;  // positive: Bob lags Alice
  double correlation_peak = 0.0;
  long lag_samples = 0;  // integer peak before refinement
};

/// Least-squares line removed.
std::vector<double> detrend(std::span<const double> x);

/// Normalized cross-correlation over lags |k| <= max_lag_s * fs, with
/// parabolic sub-sample refinement. Lags are evaluated in parallel.
DelayEstimate cross_correlate_delay(const PhaseTrace& a, const PhaseTrace& b, double max_lag_s);

struct LocalizationResult {
  double delay_s = 0.0;
  double raw_position_from_bob_km = 0.0;  // (L + v delay) / 2 before clamping
  double position_from_bob_km = 0.0;
  double position_from_alice_km = 0.0;
  double correlation_peak = 0.0;
  bool clamped = false;
};

/// Source position from the Bob-minus-Alice arrival delay. Delays up to
/// slack_s beyond the transit time are clamped (flagged); larger ones throw.
LocalizationResult locate(double delay_s, const LinkGeometry& geom, double slack_s = 0.0);

/// Frequency in [f_lo, f_hi] with the largest Hann-windowed DTFT magnitude.
double dominant_frequency(std::span<const double> x, double sample_rate_hz, double f_lo,
                          double f_hi);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

namespace serial {

DelayEstimate cross_correlate_delay(const PhaseTrace& a, const PhaseTrace& b, double max_lag_s);
double dominant_frequency(std::span<const double> x, double sample_rate_hz, double f_lo,
                          double f_hi);

}  // namespace serial

}  // namespace snstf
