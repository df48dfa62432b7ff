#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "snstf/simulate.hpp"

namespace snstf {

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::vacuum: return "vac";
    case Slot::mu1: return "mu1";
    case Slot::mu2: return "mu2";
    case Slot::z_send: return "z_send";
    case Slot::z_none: return "z_none";
  }
  return "?";
}

WindowKind window_of(Slot s) {
  return (s == Slot::z_send || s == Slot::z_none) ? WindowKind::signal : WindowKind::decoy;
}

double slot_intensity(Slot s, const SourceParams& src) {
  switch (s) {
    case Slot::mu1: return src.mu1;
    case Slot::mu2: return src.mu2;
    case Slot::z_send: return src.muz;
    default: return 0.0;
  }
}

double slot_probability(Slot s, const SourceParams& src) {
  switch (s) {
    case Slot::vacuum: return src.p_decoy_window * src.p_vac;
    case Slot::mu1: return src.p_decoy_window * src.p_mu1;
    case Slot::mu2: return src.p_decoy_window * src.p_mu2;
    case Slot::z_send: return src.p_signal_window * src.epsilon_send;
    case Slot::z_none: return src.p_signal_window * (1.0 - src.epsilon_send);
  }
  return 0.0;
}

bool is_phase_slot_pair(Slot a, Slot b) {
  auto decoy_on = [](Slot s) { return s == Slot::mu1 || s == Slot::mu2; };
  return decoy_on(a) && decoy_on(b);
}

ZBits z_bit_assignment(bool alice_sent, bool bob_sent) {
  ZBits z;
  z.bit_a = alice_sent ? 1 : 0;
  z.bit_b = bob_sent ? 0 : 1;
  z.is_error = alice_sent == bob_sent;
  return z;
}

TallyRow& TallyRow::operator+=(const TallyRow& o) {
  pulses += o.pulses;
  events += o.events;
  errors += o.errors;
  slice_pulses += o.slice_pulses;
  slice_events += o.slice_events;
  single_photon_events += o.single_photon_events;
  return *this;
}

double SessionTally::total_pulses() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.pulses;
  return s;
}

double SessionTally::total_events() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.events;
  return s;
}

double SessionTally::z_events() const {
  double s = 0.0;
  for (Slot a : {Slot::z_send, Slot::z_none})
    for (Slot b : {Slot::z_send, Slot::z_none}) s += at(a, b).events;
  return s;
}

double SessionTally::z_errors() const {
  return at(Slot::z_send, Slot::z_send).events + at(Slot::z_none, Slot::z_none).events;
}

double SessionTally::z_qber() const {
  const double n = z_events();
  return n > 0.0 ? z_errors() / n : 0.0;
}

double SessionTally::x_qber() const {
  const auto& r = at(Slot::mu1, Slot::mu1);
  return r.slice_events > 0.0 ? r.errors / r.slice_events : 0.0;
}

double SessionTally::true_untagged() const {
  return at(Slot::z_send, Slot::z_none).single_photon_events +
         at(Slot::z_none, Slot::z_send).single_photon_events;
}

SessionTally& SessionTally::operator+=(const SessionTally& o) {
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += o.rows[i];
  z_bits_alice.insert(z_bits_alice.end(), o.z_bits_alice.begin(), o.z_bits_alice.end());
  z_bits_bob.insert(z_bits_bob.end(), o.z_bits_bob.begin(), o.z_bits_bob.end());
  z_single_photon.insert(z_single_photon.end(), o.z_single_photon.begin(),
                         o.z_single_photon.end());
  return *this;
}

void SessionTally::check_invariants() const {
  constexpr double slack = 1e-9;
  for (Slot a : kAllSlots) {
    for (Slot b : kAllSlots) {
      const auto& r = at(a, b);
      const std::string where = std::string(slot_name(a)) + "/" + slot_name(b);
      if (r.events > r.pulses * (1.0 + slack) + slack)
        throw std::logic_error("tally row " + where + ": events exceed pulses");
      if (r.errors > r.events * (1.0 + slack) + slack)
        throw std::logic_error("tally row " + where + ": errors exceed events");
      if (r.slice_events > r.slice_pulses * (1.0 + slack) + slack)
        throw std::logic_error("tally row " + where + ": slice events exceed slice pulses");
    }
  }
  if (z_bits_alice.size() != z_bits_bob.size() || z_bits_alice.size() != z_single_photon.size())
    throw std::logic_error("z bit records have mismatched lengths");
}

namespace {

// Slice weights depend only on (sigma, half-width), which stay fixed across
// an optimization run.
const PhaseQuadrature& cached_slice(double sigma, double half_width) {
  thread_local double cached_sigma = -1.0;
  thread_local double cached_width = -1.0;
  thread_local PhaseQuadrature quad;
  if (sigma != cached_sigma || half_width != cached_width) {
    quad = PhaseQuadrature::slice(sigma, half_width);
    cached_sigma = sigma;
    cached_width = half_width;
  }
  return quad;
}

}  // namespace

SessionTally expected_tallies(const LinkModel& link, const DetectorModel& det,
                              const SourceParams& src, double n_pulses,
                              const ProtocolOptions& opts) {
  if (!(n_pulses > 0.0)) throw std::invalid_argument("n_pulses must be > 0");
  const double eta_a = side_transmittance(link.loss_a_db(), det);
  const double eta_b = side_transmittance(link.loss_b_db(), det);
  const double n = link.noise_per_pulse;
  if (!(opts.slice_half_width > 0.0 && opts.slice_half_width <= std::numbers::pi / 2.0))
    throw std::invalid_argument("slice_half_width must be in (0, pi/2]");
  const double sigma = src.phase_sigma();
  const double accept = slice_acceptance(opts.slice_half_width);
  static const PhaseQuadrature full = PhaseQuadrature::full_circle();
  const PhaseQuadrature& slice = cached_slice(sigma, opts.slice_half_width);

  SessionTally t;
  for (Slot a : kAllSlots) {
    for (Slot b : kAllSlots) {
      auto& r = t.at(a, b);
      const double mu_a = slot_intensity(a, src);
      const double mu_b = slot_intensity(b, src);
      const double x = mu_a * eta_a;
      const double y = mu_b * eta_b;
      r.pulses = n_pulses * slot_probability(a, src) * slot_probability(b, src);
      if (r.pulses == 0.0) continue;

      const auto cp = average_clicks(x, y, n, full);
      r.events = r.pulses * cp.heralded();

      if (is_phase_slot_pair(a, b)) {
        const auto sp = average_clicks(x, y, n, slice);
        r.slice_pulses = r.pulses * accept;
        r.slice_events = r.slice_pulses * sp.heralded();
        r.errors = r.slice_pulses * sp.right;
      } else if ((a == Slot::z_send && b == Slot::z_send) ||
                 (a == Slot::z_none && b == Slot::z_none)) {
        r.errors = r.events;
      }

      // Exactly one photon emitted; it reaches a port with probability 1/2
      // each under a uniform relative phase.
      const double mu = mu_a + mu_b;
      const double arrive = x + y;
      r.single_photon_events =
          r.pulses * std::exp(-mu) *
          (arrive * (1.0 - n) + (mu - arrive) * 2.0 * n * (1.0 - n));
    }
  }
  return t;
}

}  // namespace snstf
