#pragma once

// Session statistics for the 4-intensity SNS protocol: analytic expectation
// values and seeded Monte Carlo event generation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "snstf/core.hpp"

namespace snstf {

class Rng;

inline constexpr int kQuadraturePoints = 2048;

/// Default X-window phase-slice half-width (radians). Puts the simulated
/// X-basis QBER near 5% with the default misalignment and link.
inline constexpr double kDefaultSliceHalfWidth = 0.30;

enum class WindowKind : std::uint8_t { decoy, signal };

/// Source choice of one sender for one time slot.
enum class Slot : std::uint8_t { vacuum, mu1, mu2, z_send, z_none };
inline constexpr int kSlotCount = 5;
inline constexpr std::array<Slot, kSlotCount> kAllSlots = {Slot::vacuum, Slot::mu1, Slot::mu2,
                                                           Slot::z_send, Slot::z_none};

enum class Click : std::uint8_t { none, left, right, both };

const char* slot_name(Slot s);
WindowKind window_of(Slot s);
double slot_intensity(Slot s, const SourceParams& src);
double slot_probability(Slot s, const SourceParams& src);
/// Both senders in decoy windows with non-vacuum intensities; only these
/// slots carry an announced relative phase.
bool is_phase_slot_pair(Slot a, Slot b);

struct ClickProbabilities {
  double left = 0.0;
  double right = 0.0;
  double both = 0.0;

  double heralded() const { return left + right; }
};

/// Exclusive click probabilities for two phase-randomized coherent pulses,
/// averaged over a uniform relative phase with 2048-point quadrature.
ClickProbabilities click_probabilities(double intens_a, double intens_b, double eta_a,
                                       double eta_b, double phase_sigma, double noise);

/// Same model, but the relative phase is uniform on [-half_width, half_width]
/// and then jittered by a Gaussian of std-dev phase_sigma. `arrived_a` and
/// `arrived_b` are mean photon numbers at the beam splitter.
ClickProbabilities sliced_click_probabilities(double arrived_a, double arrived_b,
                                              double phase_sigma, double half_width,
                                              double noise);

/// Quadrature rule over the relative phase: cos(theta) nodes and weights
/// summing to one.
struct PhaseQuadrature {
  std::vector<double> cos_theta;
  std::vector<double> weight;

  static PhaseQuadrature full_circle();
  static PhaseQuadrature slice(double phase_sigma, double half_width);
};

ClickProbabilities average_clicks(double arrived_a, double arrived_b, double noise,
                                  const PhaseQuadrature& quad);

/// Instantaneous click probabilities at a fixed relative phase.
ClickProbabilities click_probabilities_at(double arrived_a, double arrived_b, double theta,
                                          double noise);

struct ProtocolOptions {
  double slice_half_width = kDefaultSliceHalfWidth;
};

/// Fraction of phase-slot pulses whose announced relative phase lands in one
/// of the two accepted slices (around 0 and pi).
double slice_acceptance(double half_width);

struct TallyRow {
  double pulses = 0.0;
  double events = 0.0;  // one-detector heralded
  double errors = 0.0;
  // Phase-slot rows only: pulses and heralded events inside the slice.
  double slice_pulses = 0.0;
  double slice_events = 0.0;
  // Ground truth: heralded events with exactly one photon emitted in total.
  double single_photon_events = 0.0;

  TallyRow& operator+=(const TallyRow& o);
};

/// Counted (or expected) events per (Alice slot, Bob slot) pair. Expected
/// tallies hold real values; Monte Carlo tallies hold integers.
struct SessionTally {
  std::array<TallyRow, kSlotCount * kSlotCount> rows{};
  // Signal-window heralded events in pulse order.
  std::vector<std::uint8_t> z_bits_alice;
  std::vector<std::uint8_t> z_bits_bob;
  std::vector<std::uint8_t> z_single_photon;

  TallyRow& at(Slot a, Slot b) {
    return rows[static_cast<int>(a) * kSlotCount + static_cast<int>(b)];
  }
  const TallyRow& at(Slot a, Slot b) const {
    return rows[static_cast<int>(a) * kSlotCount + static_cast<int>(b)];
  }

  double total_pulses() const;
  double total_events() const;
  /// Heralded events with both senders in signal windows.
  double z_events() const;
  double z_errors() const;
  double z_qber() const;
  /// Error rate inside the accepted phase slice of the mu1/mu1 decoy row.
  double x_qber() const;
  /// Ground-truth untagged Z events: exactly one side sent and it emitted a
  /// single photon.
  double true_untagged() const;

  SessionTally& operator+=(const SessionTally& o);
  /// Throws std::logic_error if a row violates events <= pulses or
  /// errors <= events.
  void check_invariants() const;
};

struct WindowOutcome {
  WindowKind window_kind_a = WindowKind::decoy;
  WindowKind window_kind_b = WindowKind::decoy;
  Slot slot_a = Slot::vacuum;
  Slot slot_b = Slot::vacuum;
  double intensity_a = 0.0;
  double intensity_b = 0.0;
  bool alice_sent = false;
  bool bob_sent = false;
  Click detector_click = Click::none;
  bool in_slice = false;
  bool is_error = false;
  std::uint64_t true_photon_count_total = 0;
};

struct ZBits {
  std::uint8_t bit_a = 0;
  std::uint8_t bit_b = 0;
  bool is_error = false;
};

/// Asymmetric SNS bit convention: Alice's bit is 1 iff she sent, Bob's bit
/// is 0 iff he sent.
ZBits z_bit_assignment(bool alice_sent, bool bob_sent);

/// Precomputed per-session constants shared by every pulse.
struct PulseContext {
  PulseContext(const LinkModel& link, const DetectorModel& det, const SourceParams& src,
               const ProtocolOptions& opts);

  SourceParams src;
  double eta_a = 0.0;
  double eta_b = 0.0;
  double noise = 0.0;
  double phase_sigma = 0.0;
  double slice_half_width = 0.0;
  std::array<double, kSlotCount> cumulative{};  // slot selection CDF
};

/// Draw one time slot.
WindowOutcome sample_window(Rng& rng, const PulseContext& ctx);

SessionTally expected_tallies(const LinkModel& link, const DetectorModel& det,
                              const SourceParams& src, double n_pulses,
                              const ProtocolOptions& opts = {});

/// Pulses per RNG substream. Substreams follow pulse index, so a session's
/// result does not depend on how the blocks are split over threads.
inline constexpr std::uint64_t kPulsesPerBlock = 1ULL << 16;

/// Monte Carlo session, pulse blocks partitioned over OpenMP threads.
/// `partitions` = 0 uses one partition per available thread.
SessionTally monte_carlo_session(const LinkModel& link, const DetectorModel& det,
                                 const SourceParams& src, std::uint64_t n_pulses,
                                 std::uint64_t seed, const ProtocolOptions& opts = {},
                                 int partitions = 0);

namespace serial {

/// Reference implementation: one pass over all pulses, no threading.
SessionTally monte_carlo_session(const LinkModel& link, const DetectorModel& det,
                                 const SourceParams& src, std::uint64_t n_pulses,
                                 std::uint64_t seed, const ProtocolOptions& opts = {});

}  // namespace serial

}  // namespace snstf
