#include "snstf/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snstf {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

void LinkModel::validate() const {
  require(std::isfinite(length_a_km) && length_a_km >= 0.0, "link.length_a_km must be >= 0");
  require(std::isfinite(length_b_km) && length_b_km >= 0.0, "link.length_b_km must be >= 0");
  require(std::isfinite(atten_db_per_km) && atten_db_per_km >= 0.0,
          "link.atten_db_per_km must be >= 0");
  require(std::isfinite(station_loss_db) && station_loss_db >= 0.0,
          "link.station_loss_db must be >= 0");
  require(std::isfinite(noise_per_pulse) && noise_per_pulse >= 0.0 && noise_per_pulse < 1.0,
          "link.noise_per_pulse must be in [0,1)");
}

LinkModel LinkModel::with_total_length(double total_km) const {
  LinkModel out = *this;
  out.length_a_km = total_km / 2.0;
  out.length_b_km = total_km / 2.0;
  return out;
}

void DetectorModel::validate() const {
  require(is_probability(efficiency), "detector.efficiency must be in [0,1]");
  require(std::isfinite(dark_rate_hz) && dark_rate_hz >= 0.0, "detector.dark_rate_hz must be >= 0");
  require(std::isfinite(gate_ns) && gate_ns > 0.0, "detector.gate_ns must be > 0");
  require(std::isfinite(pulse_rate_hz) && pulse_rate_hz > 0.0,
          "detector.pulse_rate_hz must be > 0");
}

void SourceParams::validate() const {
  require(std::isfinite(mu1) && mu1 > 0.0, "source.mu1 must be > 0");
  require(std::isfinite(mu2) && mu2 > mu1, "source.mu2 must exceed source.mu1");
  require(std::isfinite(muz) && muz >= 0.0, "source.muz must be >= 0");
  require(is_probability(p_decoy_window), "source.p_decoy_window must be in [0,1]");
  require(is_probability(p_signal_window), "source.p_signal_window must be in [0,1]");
  require(std::abs(p_decoy_window + p_signal_window - 1.0) < 1e-9,
          "source.p_decoy_window + source.p_signal_window must equal 1");
  require(is_probability(p_mu1), "source.p_mu1 must be in [0,1]");
  require(is_probability(p_mu2), "source.p_mu2 must be in [0,1]");
  require(is_probability(p_vac), "source.p_vac must be in [0,1]");
  require(std::abs(p_mu1 + p_mu2 + p_vac - 1.0) < 1e-9,
          "source.p_mu1 + source.p_mu2 + source.p_vac must equal 1");
  require(is_probability(epsilon_send), "source.epsilon_send must be in [0,1]");
  require(std::isfinite(misalignment) && misalignment >= 0.0 && misalignment < 0.5,
          "source.misalignment must be in [0,0.5)");
}

double SourceParams::phase_sigma() const {
  if (misalignment <= 0.0) return 0.0;
  return std::sqrt(-2.0 * std::log(1.0 - 2.0 * misalignment));
}

void SecurityParams::validate() const {
  auto open_unit = [](double e) { return std::isfinite(e) && e > 0.0 && e < 1.0; };
  require(std::isfinite(f_ec) && f_ec >= 1.0, "security.f_ec must be >= 1");
  require(open_unit(eps_cor), "security.eps_cor must be in (0,1)");
  require(open_unit(eps_pa), "security.eps_pa must be in (0,1)");
  require(open_unit(eps_hat), "security.eps_hat must be in (0,1)");
  require(open_unit(xi_decoy), "security.xi_decoy must be in (0,1)");
}

double transmittance(double loss_db) {
  if (!(loss_db >= 0.0)) throw std::invalid_argument("loss_db must be >= 0");
  return std::pow(10.0, -loss_db / 10.0);
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("binary_entropy: x outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double side_transmittance(double loss_db, const DetectorModel& det) {
  return transmittance(loss_db) * det.efficiency;
}

LinkModel with_dark_noise(LinkModel link, const DetectorModel& det) {
  link.noise_per_pulse = det.dark_per_pulse();
  return link;
}

}  // namespace snstf
