#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "snstf/sensing.hpp"

namespace snstf {

namespace {

// Refinement evaluates the DTFT directly. The phasor recurrence restarts from an exact value at each chunk, which
// bounds rounding drift and fixes the summation order independent of threads.
constexpr std::size_t kChunk = 4096;

struct Windowed {
  std::vector<double> x;
  double fs = 0.0;
};

Windowed prepare(std::span<const double> x, double fs, double f_lo, double f_hi) {
  if (x.size() < 4) throw std::invalid_argument("spectrum needs at least 4 samples");
  if (!(fs > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  if (!(f_lo > 0.0 && f_lo < f_hi && f_hi <= fs / 2.0))
    throw std::invalid_argument("frequency range must satisfy 0 < f_lo < f_hi <= fs/2");
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  Windowed w{std::vector<double>(n), fs};
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    w.x[i] = hann * (x[i] - mean);
  }
  return w;
}

std::complex<double> chunk_sum(const Windowed& w, double f, std::size_t c) {
  const double omega = -2.0 * std::numbers::pi * f / w.fs;
  const std::size_t begin = c * kChunk;
  const std::size_t end = std::min(w.x.size(), begin + kChunk);
  std::complex<double> z = std::polar(1.0, omega * static_cast<double>(begin));
  const std::complex<double> step = std::polar(1.0, omega);
  std::complex<double> s = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    s += w.x[i] * z;
    z *= step;
  }
  return s;
}

template <bool Parallel>
double power(const Windowed& w, double f) {
  const std::size_t chunks = (w.x.size() + kChunk - 1) / kChunk;
  std::vector<std::complex<double>> part(chunks);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) part[c] = chunk_sum(w, f, c);
  } else {
    for (std::size_t c = 0; c < chunks; ++c) part[c] = chunk_sum(w, f, c);
  }
  std::complex<double> s = 0.0;
  for (const auto& p : part) s += p;
  return std::norm(s);
}

// Coarse scan: power on the grid f_lo + k fs/(4N) from one zero-padded real
// FFT. The bins are interpolated from the 4N-point transform, whose bin
// spacing is exactly fs/(4N).
struct CoarsePeak {
  double f = 0.0;
  double power = -1.0;
  double step = 0.0;
};

CoarsePeak coarse_scan(const Windowed& w, double f_lo, double f_hi) {
  const std::size_t n = w.x.size();
  const std::size_t m = 4 * n;
  double* in = fftw_alloc_real(m);
  fftw_complex* out = fftw_alloc_complex(m / 2 + 1);
  if (!in || !out) {
    fftw_free(in);
    fftw_free(out);
    throw std::bad_alloc();
  }
  fftw_plan plan;
#pragma omp critical(snstf_fftw_plan)
  plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  std::copy(w.x.begin(), w.x.end(), in);
  std::fill(in + n, in + m, 0.0);
  fftw_execute(plan);

  CoarsePeak c;
  c.step = w.fs / static_cast<double>(m);
  const auto first = static_cast<std::size_t>(std::ceil(f_lo / c.step));
  const auto last = std::min(m / 2, static_cast<std::size_t>(std::floor(f_hi / c.step)));
  for (std::size_t k = first; k <= last; ++k) {
    const double p = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    if (p > c.power) {
      c.power = p;
      c.f = static_cast<double>(k) * c.step;
    }
  }
#pragma omp critical(snstf_fftw_plan)
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);
  return c;
}

template <bool Parallel>
double peak_frequency(std::span<const double> x, double fs, double f_lo, double f_hi) {
  const Windowed w = prepare(x, fs, f_lo, f_hi);
  const CoarsePeak coarse = coarse_scan(w, f_lo, f_hi);
  const double step = coarse.step;
  double best_f = coarse.f;
  double best_p = -1.0;
  // Band edges are candidates too; the FFT grid may not reach them.
  for (double f : {f_lo, f_hi, coarse.f}) {
    if (coarse.power < 0.0 && f == coarse.f) continue;
    const double p = power<Parallel>(w, f);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  // Golden-section refinement on the bracketing coarse cell.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::max(f_lo, best_f - step);
  double hi = std::min(f_hi, best_f + step);
  double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
  double p1 = power<Parallel>(w, m1), p2 = power<Parallel>(w, m2);
  while (hi - lo > 1e-9 * std::max(1.0, best_f)) {
    if (p1 > p2) {
      hi = m2;
      m2 = m1;
      p2 = p1;
      m1 = hi - g * (hi - lo);
      p1 = power<Parallel>(w, m1);
    } else {
      lo = m1;
      m1 = m2;
      p1 = p2;
      m2 = lo + g * (hi - lo);
      p2 = power<Parallel>(w, m2);
    }
  }
  const double f = 0.5 * (lo + hi);
  return power<Parallel>(w, f) >= best_p ? f : best_f;
}

}  // namespace

double dominant_frequency(std::span<const double> x, double sample_rate_hz, double f_lo,
                          double f_hi) {
  return peak_frequency<true>(x, sample_rate_hz, f_lo, f_hi);
}

namespace serial {

double dominant_frequency(std::span<const double> x, double sample_rate_hz, double f_lo,
                          double f_hi) {
  return peak_frequency<false>(x, sample_rate_hz, f_lo, f_hi);
}

}  // namespace serial

}  // namespace snstf
