#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "snstf/rng.hpp"
#include "snstf/sensing.hpp"
#include "snstf/simulate.hpp"

namespace snstf {

std::vector<FrameCounts> synthesize_reference_counts(std::span<const double> phase,
                                                     double photons_per_frame, std::uint64_t seed) {
  if (!(photons_per_frame > 0.0)) throw std::invalid_argument("photons_per_frame must be > 0");
  const std::size_t n = phase.size();
  std::vector<FrameCounts> out(n);
  const std::size_t blocks = (n + kPulsesPerBlock - 1) / kPulsesPerBlock;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    Rng rng(substream_seed(seed, b));
    const std::size_t end = std::min(n, (b + 1) * kPulsesPerBlock);
    for (std::size_t k = b * kPulsesPerBlock; k < end; ++k) {
      const double c = std::cos(0.5 * phase[k]);
      const double p_left = c * c;
      out[k].left = rng.poisson(photons_per_frame * p_left);
      out[k].right = rng.poisson(photons_per_frame * (1.0 - p_left));
    }
  }
  return out;
}

PhaseTrace recover_phase_from_reference(std::span<const FrameCounts> frames, double frame_rate_hz,
                                        TraceOrigin origin) {
  if (frames.empty()) throw std::invalid_argument("no reference frames");
  if (!(frame_rate_hz > 0.0)) throw std::invalid_argument("frame rate must be > 0");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double jump = std::numbers::pi / 2.0;
  constexpr double alpha = 0.05;  // velocity smoothing

  PhaseTrace out{std::vector<double>(frames.size()), frame_rate_hz, origin};
  double prev = 0.0;
  double velocity = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const double total = static_cast<double>(frames[k].left) + static_cast<double>(frames[k].right);
    if (total == 0.0)
      throw std::invalid_argument("reference frame " + std::to_string(k) + " has no counts");
    const double raw =
        std::acos(std::clamp((static_cast<double>(frames[k].left) - frames[k].right) / total, -1.0, 1.0));
    if (k == 0) {
      out.samples[0] = prev = raw;
      continue;
    }
    // Candidates are +-raw + 2 pi m; take the one closest to the predicted
    // value.
    const double predicted = prev + velocity;
    double best = 0.0;
    double best_dist = INFINITY;
    for (double branch : {raw, -raw}) {
      const double m = std::round((predicted - branch) / two_pi);
      const double cand = branch + two_pi * m;
      const double d = std::abs(cand - predicted);
      if (d < best_dist) {
        best_dist = d;
        best = cand;
      }
    }
    if (best_dist > jump) {
      velocity = 0.0;
    } else {
      velocity = (1.0 - alpha) * velocity + alpha * (best - prev);
    }
    out.samples[k] = prev = best;
  }
  return out;
}

}  // namespace snstf
