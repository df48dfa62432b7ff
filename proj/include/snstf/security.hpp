#pragma once

// Finite-size decoy-state bounds, actively odd-parity pairing (AOPP), the
// finite-key secure rate and the repeaterless PLOB capacity.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "snstf/core.hpp"
#include "snstf/simulate.hpp"

namespace snstf {

struct KeyRateReport {
  double n1_prime = 0.0;  // untagged bits after AOPP
  double e1_ph = 0.0;     // phase-flip error rate of untagged bits
  double nt_prime = 0.0;  // survived bits after AOPP
  double e_z = 0.0;       // bit-flip error rate after AOPP
  double n_total = 0.0;   // total signal pulses
  double rate_per_pulse = 0.0;
  double rate_bps = 0.0;

  void validate() const;
};

/// Individual terms of the finite-key formula, all in bits.
struct KeyRateTerms {
  double untagged_entropy = 0.0;   // n1' [1 - H(e1_ph)]
  double error_correction = 0.0;   // f nt' H(E_Z)
  double correctness = 0.0;        // 2 log2(2 / eps_cor)
  double privacy = 0.0;            // 2 log2(1 / (sqrt2 eps_PA eps_hat))
  double net_bits() const { return untagged_entropy - error_correction - correctness - privacy; }
};

KeyRateTerms key_rate_terms(const KeyRateReport& in, const SecurityParams& sec);

/// Finite-key rate per pulse; may be negative.
double key_rate(const KeyRateReport& in, const SecurityParams& sec);

/// Fills rate_per_pulse and rate_bps.
KeyRateReport with_rates(KeyRateReport in, const SecurityParams& sec, double pulse_rate_hz);

/// -log2(1 - eta). Throws for eta outside [0,1).
double plob_bound(double eta);

struct ExpectationBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Two-sided multiplicative Chernoff bounds on the mean of a Poisson-like
/// count from one observation; each side fails with probability <= xi.
ExpectationBounds fluctuation_bounds(double observed, double xi);

/// Smallest observation consistent (at failure probability xi) with a count
/// whose expectation is `expectation`.
double observed_lower_from_expectation(double expectation, double xi);

struct DecoyEstimate {
  double n1_lower = 0.0;   // untagged Z events (both sides)
  double n1_alice = 0.0;   // untagged with Alice sending
  double n1_bob = 0.0;     // untagged with Bob sending
  double e1ph_upper = 0.5;
  double s1_lower = 0.0;   // single-photon yield
  bool feasible = false;
};

/// Two-decoy-plus-vacuum estimate of the untagged event count and its
/// phase-flip error rate from decoy-window tallies.
DecoyEstimate decoy_bounds(const SessionTally& tally, const SourceParams& src,
                           const SecurityParams& sec);

/// Phase-flip error rate after AOPP: 2e(1-e), clamped to [0, 0.5].
double post_aopp_phase_error(double n1_before, double e1ph_before, double survived_pairs);

struct BitPair {
  std::size_t first = 0;   // distilled bit comes from this event
  std::size_t second = 0;
};

/// Bob's random pairing of each 1-bit with a distinct 0-bit; the order
/// inside each pair is also random.
std::vector<BitPair> aopp_pairs(std::span<const std::uint8_t> bits_b, std::uint64_t seed);

struct AoppResult {
  std::vector<std::uint8_t> bits_a;
  std::vector<std::uint8_t> bits_b;
  std::vector<BitPair> survivors;
  std::size_t pairs_formed = 0;
  std::size_t survived = 0;
};

/// Keeps the pairs whose Alice parity is odd.
AoppResult aopp_distill(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                        std::span<const BitPair> pairs);

AoppResult aopp(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                std::uint64_t seed);

double error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Expected AOPP outcome from Z-window tallies and the untagged estimate.
struct AoppExpectation {
  double pairs = 0.0;
  double survived = 0.0;   // nt'
  double untagged = 0.0;   // n1'
  double e_z = 0.0;
};

AoppExpectation expected_aopp(const SessionTally& tally, const DecoyEstimate& decoy);

/// Full finite-key pipeline over a tally: decoy bounds, expected AOPP
/// survival, phase-error propagation. n_total is the number of pulses.
KeyRateReport analyze_tally(const SessionTally& tally, const SourceParams& src,
                            const SecurityParams& sec, double pulse_rate_hz);

}  // namespace snstf
