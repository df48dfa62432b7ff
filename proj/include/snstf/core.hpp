#pragma once

// Shared domain types and elementary numerics for the SNS twin-field lab.

#include <cstdint>

namespace snstf {

/// Fiber link between the two senders and the central measurement station.
struct LinkModel {
  double length_a_km = 329.3;
  double length_b_km = 329.4;
  double atten_db_per_km = 0.161;
  double station_loss_db = 1.3;
  /// Combined per-pulse click probability of one detector (dark counts plus
  /// re-Rayleigh floor).
  double noise_per_pulse = 6e-9;

  void validate() const;

  double loss_a_db() const { return length_a_km * atten_db_per_km + station_loss_db; }
  double loss_b_db() const { return length_b_km * atten_db_per_km + station_loss_db; }
  double total_length_km() const { return length_a_km + length_b_km; }

  /// Symmetric link of the given total length with everything else copied.
  LinkModel with_total_length(double total_km) const;
};

struct DetectorModel {
  double efficiency = 0.82;
  double dark_rate_hz = 4.0;
  double gate_ns = 0.3;
  double pulse_rate_hz = 1e8;

  void validate() const;

  double dark_per_pulse() const { return dark_rate_hz * gate_ns * 1e-9; }
};

/// 4-intensity sending-or-not-sending source configuration. Decoy windows
/// choose among {mu1, mu2, vacuum}; signal windows send muz with
/// probability epsilon_send and vacuum otherwise.
struct SourceParams {
  // Defaults: optimized for the 106 dB link with epsilon_send held fixed.
  double mu1 = 0.0607;
  double mu2 = 0.4231;
  double muz = 0.4245;
  double p_decoy_window = 0.4229;
  double p_signal_window = 0.5771;
  double p_mu1 = 0.5674;
  double p_mu2 = 0.0457;
  double p_vac = 0.3869;
  double epsilon_send = 0.2717;
  /// Baseline X-basis error fraction from phase misalignment.
  double misalignment = 0.028;

  void validate() const;

  /// Std-dev of the Gaussian phase jitter that reproduces `misalignment` at
  /// zero relative phase: (1 - exp(-sigma^2/2)) / 2 = misalignment.
  double phase_sigma() const;
};

struct SecurityParams {
  double f_ec = 1.16;
  double eps_cor = 1e-10;
  double eps_pa = 1e-10;
  double eps_hat = 1e-10;
  double xi_decoy = 1e-10;

  void validate() const;
};

/// Link transmittance for a loss in dB. Throws std::invalid_argument for
/// negative loss.
double transmittance(double loss_db);

/// Binary Shannon entropy in bits, H(0) = H(1) = 0.
double binary_entropy(double x);

/// Per-pulse arrival probability at the station for one side, detector
/// efficiency included.
double side_transmittance(double loss_db, const DetectorModel& det);

/// Per-pulse noise probability from a dark count rate and gate width.
LinkModel with_dark_noise(LinkModel link, const DetectorModel& det);

}  // namespace snstf
