#pragma once

// Shared links and tally comparisons for the test suites.

#include <cmath>
#include <functional>
#include <string>

#include "snstf/core.hpp"
#include "snstf/simulate.hpp"

namespace snstf::testing {

/// Mild link: 20 dB of fiber in total, no station loss.
inline LinkModel desk_link() {
  LinkModel l;
  l.station_loss_db = 0.0;
  l.length_a_km = l.length_b_km = 10.0 / l.atten_db_per_km;
  return l;
}

/// The 106 dB link with `reduction_db` less fiber loss. Each side gains a
/// factor 10^(reduction/20) in transmittance and the noise is raised by the
/// same factor, so while click probabilities stay small the QBERs and the
/// signal-to-noise ratio match the full link at a far higher event rate.
inline LinkModel scaled_long_link(double reduction_db = 80.0) {
  LinkModel l;
  const double fiber_db = l.total_length_km() * l.atten_db_per_km - reduction_db;
  const double share = l.length_a_km / l.total_length_km();
  const double total_km = fiber_db / l.atten_db_per_km;
  l.length_a_km = total_km * share;
  l.length_b_km = total_km * (1.0 - share);
  l.noise_per_pulse *= std::pow(10.0, reduction_db / 20.0);
  return l;
}

struct Deviation {
  double sigmas = 0.0;
  std::string where;
};

/// Largest deviation, in binomial standard deviations, between a counted
/// tally and the expectation for the same pulse count. A field with zero
/// expectation must be exactly zero.
inline Deviation max_deviation(const SessionTally& counted, const SessionTally& expected) {
  const double n = counted.total_pulses();
  Deviation worst;
  auto check = [&](double c, double e, const std::string& where) {
    const double p = e / n;
    const double sd = std::sqrt(n * p * (1.0 - p));
    double z = 0.0;
    if (sd > 0.0) z = std::abs(c - e) / sd;
    else if (c != e) z = INFINITY;
    if (z > worst.sigmas) worst = {z, where};
  };
  for (Slot a : kAllSlots)
    for (Slot b : kAllSlots) {
      const auto& c = counted.at(a, b);
      const auto& e = expected.at(a, b);
      const std::string row = std::string(slot_name(a)) + "/" + slot_name(b);
      check(c.pulses, e.pulses, row + " pulses");
      check(c.events, e.events, row + " events");
      check(c.errors, e.errors, row + " errors");
      check(c.slice_pulses, e.slice_pulses, row + " slice_pulses");
      check(c.slice_events, e.slice_events, row + " slice_events");
      check(c.single_photon_events, e.single_photon_events, row + " single_photon_events");
    }
  return worst;
}

inline bool same_tally(const SessionTally& a, const SessionTally& b) {
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.pulses != y.pulses || x.events != y.events || x.errors != y.errors ||
        x.slice_pulses != y.slice_pulses || x.slice_events != y.slice_events ||
        x.single_photon_events != y.single_photon_events)
      return false;
  }
  return a.z_bits_alice == b.z_bits_alice && a.z_bits_bob == b.z_bits_bob &&
         a.z_single_photon == b.z_single_photon;
}

}  // namespace snstf::testing
