#include <algorithm>
#include <cmath>

#include "snstf/security.hpp"

namespace snstf {

namespace {

struct YieldBounds {
  double lower = 0.0;
  double upper = 1.0;
};

YieldBounds yield_bounds(const TallyRow& r, double xi) {
  if (r.pulses <= 0.0) return {};
  const auto b = fluctuation_bounds(r.events, xi);
  return {b.lower / r.pulses, std::min(1.0, b.upper / r.pulses)};
}

// Two-decoy-with-vacuum lower bound on the single-photon yield.
double single_photon_yield(double mu1, double mu2, double q1_lower, double q2_upper,
                           double y0_upper) {
  const double num = mu2 * mu2 * std::exp(mu1) * q1_lower -
                     mu1 * mu1 * std::exp(mu2) * q2_upper - (mu2 * mu2 - mu1 * mu1) * y0_upper;
  return num / (mu1 * mu2 * (mu2 - mu1));
}

}  // namespace

DecoyEstimate decoy_bounds(const SessionTally& tally, const SourceParams& src,
                           const SecurityParams& sec) {
  DecoyEstimate est;
  const double mu1 = src.mu1;
  const double mu2 = src.mu2;
  if (!(mu1 > 0.0 && mu2 > mu1)) return est;
  const double xi = sec.xi_decoy;

  const auto y0 = yield_bounds(tally.at(Slot::vacuum, Slot::vacuum), xi);
  const auto qa1 = yield_bounds(tally.at(Slot::mu1, Slot::vacuum), xi);
  const auto qa2 = yield_bounds(tally.at(Slot::mu2, Slot::vacuum), xi);
  const auto qb1 = yield_bounds(tally.at(Slot::vacuum, Slot::mu1), xi);
  const auto qb2 = yield_bounds(tally.at(Slot::vacuum, Slot::mu2), xi);

  const double s10 = std::max(0.0, single_photon_yield(mu1, mu2, qa1.lower, qa2.upper, y0.upper));
  const double s01 = std::max(0.0, single_photon_yield(mu1, mu2, qb1.lower, qb2.upper, y0.upper));
  est.s1_lower = 0.5 * (s10 + s01);
  if (est.s1_lower <= 0.0) return est;

  // Untagged: exactly one side sends and emits one photon.
  const double muz = src.muz;
  const double single = muz * std::exp(-muz);
  est.n1_alice =
      observed_lower_from_expectation(tally.at(Slot::z_send, Slot::z_none).pulses * single * s10, xi);
  est.n1_bob =
      observed_lower_from_expectation(tally.at(Slot::z_none, Slot::z_send).pulses * single * s01, xi);
  est.n1_lower = est.n1_alice + est.n1_bob;

  // Phase-flip error from the in-slice mu1/mu1 errors; the vacuum component
  // errs half the time.
  const auto& x = tally.at(Slot::mu1, Slot::mu1);
  if (x.slice_pulses > 0.0) {
    const double t_x = fluctuation_bounds(x.errors, xi).upper / x.slice_pulses;
    const double decay = std::exp(-2.0 * mu1);
    const double e1 =
        (t_x - 0.5 * decay * y0.lower) / (2.0 * mu1 * decay * est.s1_lower);
    est.e1ph_upper = std::clamp(e1, 0.0, 0.5);
  }
  est.feasible = est.n1_lower > 0.0;
  return est;
}

}  // namespace snstf
