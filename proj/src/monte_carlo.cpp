#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "snstf/rng.hpp"
#include "snstf/simulate.hpp"

namespace snstf {

namespace {

constexpr double kPi = std::numbers::pi;

void check_options(const ProtocolOptions& opts) {
  if (!(opts.slice_half_width > 0.0 && opts.slice_half_width <= kPi / 2.0))
    throw std::invalid_argument("slice_half_width must be in (0, pi/2]");
}

Slot draw_slot(Rng& rng, const std::array<double, kSlotCount>& cdf) {
  const double u = rng.uniform();
  for (int i = 0; i < kSlotCount - 1; ++i)
    if (u < cdf[i]) return static_cast<Slot>(i);
  return static_cast<Slot>(kSlotCount - 1);
}

void record(SessionTally& t, const WindowOutcome& w) {
  auto& r = t.at(w.slot_a, w.slot_b);
  r.pulses += 1.0;
  const bool heralded = w.detector_click == Click::left || w.detector_click == Click::right;
  const bool phase_pair = is_phase_slot_pair(w.slot_a, w.slot_b);
  if (phase_pair && w.in_slice) r.slice_pulses += 1.0;
  if (!heralded) return;
  r.events += 1.0;
  if (w.true_photon_count_total == 1) r.single_photon_events += 1.0;
  if (phase_pair) {
    if (w.in_slice) {
      r.slice_events += 1.0;
      if (w.is_error) r.errors += 1.0;
    }
    return;
  }
  if (w.window_kind_a == WindowKind::signal && w.window_kind_b == WindowKind::signal) {
    const auto z = z_bit_assignment(w.alice_sent, w.bob_sent);
    if (z.is_error) r.errors += 1.0;
    t.z_bits_alice.push_back(z.bit_a);
    t.z_bits_bob.push_back(z.bit_b);
    t.z_single_photon.push_back(w.true_photon_count_total == 1 ? 1 : 0);
  }
}

void run_block(SessionTally& t, const PulseContext& ctx, std::uint64_t seed, std::uint64_t block,
               std::uint64_t count) {
  Rng rng(substream_seed(seed, block));
  for (std::uint64_t i = 0; i < count; ++i) record(t, sample_window(rng, ctx));
}

std::uint64_t block_size(std::uint64_t n_pulses, std::uint64_t block) {
  const std::uint64_t begin = block * kPulsesPerBlock;
  return std::min(kPulsesPerBlock, n_pulses - begin);
}

}  // namespace

PulseContext::PulseContext(const LinkModel& link, const DetectorModel& det,
                           const SourceParams& s, const ProtocolOptions& opts)
    : src(s),
      eta_a(side_transmittance(link.loss_a_db(), det)),
      eta_b(side_transmittance(link.loss_b_db(), det)),
      noise(link.noise_per_pulse),
      phase_sigma(s.phase_sigma()),
      slice_half_width(opts.slice_half_width) {
  double acc = 0.0;
  for (int i = 0; i < kSlotCount; ++i) {
    acc += slot_probability(static_cast<Slot>(i), src);
    cumulative[i] = acc;
  }
}

WindowOutcome sample_window(Rng& rng, const PulseContext& ctx) {
  WindowOutcome w;
  w.slot_a = draw_slot(rng, ctx.cumulative);
  w.slot_b = draw_slot(rng, ctx.cumulative);
  w.window_kind_a = window_of(w.slot_a);
  w.window_kind_b = window_of(w.slot_b);
  w.intensity_a = slot_intensity(w.slot_a, ctx.src);
  w.intensity_b = slot_intensity(w.slot_b, ctx.src);
  w.alice_sent = w.intensity_a > 0.0;
  w.bob_sent = w.intensity_b > 0.0;

  const std::uint64_t k_a = rng.poisson(w.intensity_a);
  const std::uint64_t k_b = rng.poisson(w.intensity_b);
  w.true_photon_count_total = k_a + k_b;
  const std::uint64_t arrived = rng.binomial(k_a, ctx.eta_a) + rng.binomial(k_b, ctx.eta_b);

  // Relative phase: announced (nominal) phase plus misalignment jitter for
  // phase slots; fully random otherwise.
  double theta = 0.0;
  bool expect_left = true;
  const bool phase_pair = is_phase_slot_pair(w.slot_a, w.slot_b);
  if (phase_pair) {
    const double nominal = kPi * (2.0 * rng.uniform() - 1.0);
    const double dist0 = std::abs(nominal);
    w.in_slice = dist0 <= ctx.slice_half_width || kPi - dist0 <= ctx.slice_half_width;
    expect_left = dist0 <= ctx.slice_half_width;
    theta = nominal + ctx.phase_sigma * rng.normal();
  } else if (arrived > 0) {
    theta = 2.0 * kPi * rng.uniform();
  }

  std::uint64_t at_left = 0;
  if (arrived > 0) {
    // Coherent splitting: each arriving photon independently takes the left
    // port with probability lambda_L / (x + y).
    const double x = w.intensity_a * ctx.eta_a;
    const double y = w.intensity_b * ctx.eta_b;
    const double p_left = 0.5 * (1.0 + 2.0 * std::sqrt(x * y) * std::cos(theta) / (x + y));
    at_left = rng.binomial(arrived, p_left);
  }
  const bool left = at_left > 0 || rng.bernoulli(ctx.noise);
  const bool right = arrived - at_left > 0 || rng.bernoulli(ctx.noise);
  w.detector_click = left ? (right ? Click::both : Click::left) : (right ? Click::right : Click::none);
  if (phase_pair && w.in_slice) {
    w.is_error = expect_left ? w.detector_click == Click::right : w.detector_click == Click::left;
  }
  return w;
}

SessionTally monte_carlo_session(const LinkModel& link, const DetectorModel& det,
                                 const SourceParams& src, std::uint64_t n_pulses,
                                 std::uint64_t seed, const ProtocolOptions& opts,
                                 int partitions) {
  if (n_pulses == 0) throw std::invalid_argument("n_pulses must be > 0");
  check_options(opts);
  const PulseContext ctx(link, det, src, opts);
  const std::uint64_t n_blocks = (n_pulses + kPulsesPerBlock - 1) / kPulsesPerBlock;
  const int parts = static_cast<int>(
      std::min<std::uint64_t>(n_blocks, partitions > 0 ? partitions : omp_get_max_threads()));

  // Each partition owns a contiguous range of blocks; merging in partition
  // order keeps the z-bit records in pulse order.
  std::vector<SessionTally> partial(parts);
#pragma omp parallel for schedule(static, 1) num_threads(parts)
  for (int p = 0; p < parts; ++p) {
    const std::uint64_t first = n_blocks * p / parts;
    const std::uint64_t last = n_blocks * (p + 1) / parts;
    for (std::uint64_t b = first; b < last; ++b)
      run_block(partial[p], ctx, seed, b, block_size(n_pulses, b));
  }
  SessionTally out;
  for (const auto& t : partial) out += t;
  return out;
}

namespace serial {

SessionTally monte_carlo_session(const LinkModel& link, const DetectorModel& det,
                                 const SourceParams& src, std::uint64_t n_pulses,
                                 std::uint64_t seed, const ProtocolOptions& opts) {
  if (n_pulses == 0) throw std::invalid_argument("n_pulses must be > 0");
  check_options(opts);
  const PulseContext ctx(link, det, src, opts);
  SessionTally out;
  std::uint64_t block = 0;
  Rng rng(substream_seed(seed, 0));
  for (std::uint64_t i = 0; i < n_pulses; ++i) {
    if (i / kPulsesPerBlock != block) {
      block = i / kPulsesPerBlock;
      rng = Rng(substream_seed(seed, block));
    }
    record(out, sample_window(rng, ctx));
  }
  return out;
}

}  // namespace serial

}  // namespace snstf
