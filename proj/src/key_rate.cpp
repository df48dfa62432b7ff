#include <cmath>
#include <numbers>
#include <stdexcept>

#include "snstf/security.hpp"

namespace snstf {

void KeyRateReport::validate() const {
  auto count = [](double v, const char* what) {
    if (!(std::isfinite(v) && v >= 0.0)) throw std::invalid_argument(what);
  };
  count(n1_prime, "n1_prime must be >= 0");
  count(nt_prime, "nt_prime must be >= 0");
  if (!(n_total > 0.0)) throw std::invalid_argument("n_total must be > 0");
  if (n1_prime > nt_prime) throw std::invalid_argument("n1_prime must not exceed nt_prime");
  if (!(e1_ph >= 0.0 && e1_ph <= 1.0)) throw std::invalid_argument("e1_ph must be in [0,1]");
  if (!(e_z >= 0.0 && e_z <= 1.0)) throw std::invalid_argument("e_z must be in [0,1]");
}

KeyRateTerms key_rate_terms(const KeyRateReport& in, const SecurityParams& sec) {
  in.validate();
  KeyRateTerms t;
  t.untagged_entropy = in.n1_prime * (1.0 - binary_entropy(in.e1_ph));
  t.error_correction = sec.f_ec * in.nt_prime * binary_entropy(in.e_z);
  t.correctness = 2.0 * std::log2(2.0 / sec.eps_cor);
  t.privacy = 2.0 * std::log2(1.0 / (std::numbers::sqrt2 * sec.eps_pa * sec.eps_hat));
  return t;
}

double key_rate(const KeyRateReport& in, const SecurityParams& sec) {
  return key_rate_terms(in, sec).net_bits() / in.n_total;
}

KeyRateReport with_rates(KeyRateReport in, const SecurityParams& sec, double pulse_rate_hz) {
  in.rate_per_pulse = key_rate(in, sec);
  in.rate_bps = in.rate_per_pulse * pulse_rate_hz;
  return in;
}

double plob_bound(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("plob_bound: eta must be in [0,1)");
  return -std::log1p(-eta) / std::numbers::ln2;
}

KeyRateReport analyze_tally(const SessionTally& tally, const SourceParams& src,
                            const SecurityParams& sec, double pulse_rate_hz) {
  const auto decoy = decoy_bounds(tally, src, sec);
  const auto pairing = expected_aopp(tally, decoy);
  KeyRateReport r;
  r.n1_prime = pairing.untagged;
  r.nt_prime = pairing.survived;
  r.e_z = pairing.e_z;
  r.e1_ph = post_aopp_phase_error(decoy.n1_lower, decoy.e1ph_upper, pairing.survived);
  r.n_total = tally.total_pulses();
  return with_rates(r, sec, pulse_rate_hz);
}

}  // namespace snstf
