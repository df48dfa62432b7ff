#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "snstf/rng.hpp"
#include "snstf/sensing.hpp"

namespace snstf {

const char* origin_name(TraceOrigin o) { return o == TraceOrigin::alice ? "alice" : "bob"; }

TraceOrigin parse_origin(const std::string& s) {
  if (s == "alice") return TraceOrigin::alice;
  if (s == "bob") return TraceOrigin::bob;
  throw std::invalid_argument("unknown trace origin '" + s + "'");
}

void PhaseTrace::validate() const {
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0))
    throw std::invalid_argument("trace sample rate must be > 0");
  for (double s : samples)
    if (!std::isfinite(s)) throw std::invalid_argument("trace contains non-finite samples");
}

void LinkGeometry::validate() const {
  if (!(std::isfinite(length_km) && length_km > 0.0))
    throw std::invalid_argument("sensing.length_km must be > 0");
  if (!(std::isfinite(light_speed_km_per_s) && light_speed_km_per_s > 0.0))
    throw std::invalid_argument("sensing.light_speed_km_per_s must be > 0");
}

void VibrationSource::validate(const LinkGeometry& geom) const {
  if (!(position_km >= 0.0 && position_km <= geom.length_km))
    throw std::invalid_argument("vibration.position_km must lie on the link");
  if (!(frequency_hz() > 0.0)) throw std::invalid_argument("vibration.frequency_hz must be > 0");
  if (!(start_s >= 0.0) || !(duration_s > 0.0))
    throw std::invalid_argument("vibration start must be >= 0 and duration > 0");
}

double VibrationSource::frequency_hz() const {
  return std::visit([](const auto& w) { return w.frequency_hz; }, waveform);
}

double VibrationSource::value_at(double t) const {
  // Edges within 1 ps of a sample instant are snapped, so a burst shifted by
  // a whole number of samples is sampled identically.
  constexpr double edge = 1e-12;
  double tau = t - start_s;
  if (std::abs(tau) < edge) tau = 0.0;
  if (tau < 0.0 || tau >= duration_s - edge) return 0.0;
  struct Eval {
    double tau;
    double operator()(const Sinusoid& s) const {
      return s.amplitude_rad * std::sin(2.0 * std::numbers::pi * s.frequency_hz * tau + s.phase_rad);
    }
    double operator()(const DcPlusSinusoid& s) const {
      return s.offset_rad + s.amplitude_rad * std::sin(2.0 * std::numbers::pi * s.frequency_hz * tau);
    }
  };
  return std::visit(Eval{tau}, waveform);
}

TracePair simulate_phase_traces(const LinkGeometry& geom, std::span<const VibrationSource> sources,
                                const TraceSimulation& sim) {
  geom.validate();
  const double fs = sim.sample_rate_hz;
  if (!(fs > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  if (!(sim.duration_s > 0.0)) throw std::invalid_argument("trace duration must be > 0");
  if (!(sim.drift_rate >= 0.0) || !(sim.noise_rad >= 0.0))
    throw std::invalid_argument("drift rate and noise must be >= 0");
  for (const auto& s : sources) {
    s.validate(geom);
    if (fs < 2.0 * s.frequency_hz())
      throw std::invalid_argument("sample rate below twice the vibration frequency (aliasing)");
    if (s.start_s + s.duration_s > sim.duration_s)
      throw std::invalid_argument("vibration extends past the end of the trace");
  }

  const auto n = static_cast<std::size_t>(std::llround(sim.duration_s * fs));
  TracePair out;
  out.alice = {std::vector<double>(n, 0.0), fs, TraceOrigin::alice};
  out.bob = {std::vector<double>(n, 0.0), fs, TraceOrigin::bob};
  const double v = geom.light_speed_km_per_s;

#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / fs;
    double a = 0.0, b = 0.0;
    for (const auto& s : sources) {
      a += s.value_at(t - s.position_km / v);
      b += s.value_at(t - (geom.length_km - s.position_km) / v);
    }
    out.alice.samples[k] = a;
    out.bob.samples[k] = b;
  }

  if (sim.drift_rate > 0.0 || sim.noise_rad > 0.0) {
    Rng rng(sim.seed);
    const double step = std::sqrt(sim.drift_rate / fs);
    double drift = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && step > 0.0) drift += step * rng.normal();
      out.alice.samples[k] += drift;
      out.bob.samples[k] += drift;
      if (sim.noise_rad > 0.0) {
        out.alice.samples[k] += sim.noise_rad * rng.normal();
        out.bob.samples[k] += sim.noise_rad * rng.normal();
      }
    }
  }
  return out;
}

}  // namespace snstf
