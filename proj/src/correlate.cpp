#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "snstf/sensing.hpp"

namespace snstf {

std::vector<double> detrend(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  if (n < 2) {
    if (n == 1) out[0] = 0.0;
    return out;
  }
  // Centered abscissa, so slope and intercept decouple.
  const double tc = 0.5 * static_cast<double>(n - 1);
  double sx = 0.0, stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - tc;
    sx += x[i];
    stt += t * t;
    stx += t * x[i];
  }
  const double mean = sx / n;
  const double slope = stx / stt;
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - mean - slope * (static_cast<double>(i) - tc);
  return out;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson_correlation needs equal lengths >= 2");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateTraceError("correlation of a constant sequence");
  return sab / std::sqrt(saa * sbb);
}

namespace {

struct Prepared {
  std::vector<double> a, b;
  double norm = 0.0;
  long max_lag = 0;
  double fs = 0.0;
};

double energy(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

Prepared prepare(const PhaseTrace& a, const PhaseTrace& b, double max_lag_s) {
  a.validate();
  b.validate();
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw std::invalid_argument("traces have different sample rates");
  if (a.samples.size() < 3 || b.samples.size() < 3)
    throw std::invalid_argument("traces need at least 3 samples");
  if (!(max_lag_s >= 0.0)) throw std::invalid_argument("max lag must be >= 0");

  Prepared p;
  p.fs = a.sample_rate_hz;
  p.a = detrend(a.samples);
  p.b = detrend(b.samples);
  auto scale = [](std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  };
  const double ea = energy(p.a), eb = energy(p.b);
  // Rounding residue of a detrended straight line counts as no signal.
  constexpr double tiny = 1e-24;
  const double sa = scale(a.samples), sb = scale(b.samples);
  if (ea <= tiny * p.a.size() * (1.0 + sa * sa) || eb <= tiny * p.b.size() * (1.0 + sb * sb))
    throw DegenerateTraceError("trace has no variance after detrending");
  p.norm = std::sqrt(ea * eb);
  // One extra lag on each side leaves a neighbour for refining a peak that
  // sits exactly at the physical limit.
  const long overlap = static_cast<long>(std::min(p.a.size(), p.b.size()));
  p.max_lag = std::min(overlap - 2, static_cast<long>(std::ceil(max_lag_s * p.fs - 1e-9)) + 1);
  return p;
}

// sum_t a[t] b[t + k] over the overlap.
double lag_sum(const std::vector<double>& a, const std::vector<double>& b, long k) {
  const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
  const long t0 = std::max(0L, -k);
  const long t1 = std::min(na, nb - k);
  double s = 0.0;
  for (long t = t0; t < t1; ++t) s += a[t] * b[t + k];
  return s;
}

DelayEstimate pick_peak(const Prepared& p, const std::vector<double>& c) {
  const long m = p.max_lag;
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] > c[best]) best = i;
  DelayEstimate out;
  out.lag_samples = static_cast<long>(best) - m;
  double offset = 0.0;
  double peak = c[best];
  if (best > 0 && best + 1 < c.size()) {
    const double ym = c[best - 1], y0 = c[best], yp = c[best + 1];
    const double den = ym - 2.0 * y0 + yp;
    if (den < 0.0) {
      offset = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
      peak = y0 - 0.25 * (ym - yp) * offset;
    }
  }
  out.delay_s = (static_cast<double>(out.lag_samples) + offset) / p.fs;
  out.correlation_peak = std::clamp(peak, -1.0, 1.0);
  return out;
}

}  // namespace

DelayEstimate cross_correlate_delay(const PhaseTrace& a, const PhaseTrace& b, double max_lag_s) {
  const Prepared p = prepare(a, b, max_lag_s);
  const long m = p.max_lag;
  std::vector<double> c(2 * m + 1);
#pragma omp parallel for schedule(static)
  for (long k = -m; k <= m; ++k) c[k + m] = lag_sum(p.a, p.b, k) / p.norm;
  return pick_peak(p, c);
}

namespace serial {

DelayEstimate cross_correlate_delay(const PhaseTrace& a, const PhaseTrace& b, double max_lag_s) {
  const Prepared p = prepare(a, b, max_lag_s);
  const long m = p.max_lag;
  std::vector<double> c(2 * m + 1);
  for (long k = -m; k <= m; ++k) c[k + m] = lag_sum(p.a, p.b, k) / p.norm;
  return pick_peak(p, c);
}

}  // namespace serial

LocalizationResult locate(double delay_s, const LinkGeometry& geom, double slack_s) {
  geom.validate();
  if (!std::isfinite(delay_s)) throw std::invalid_argument("delay must be finite");
  if (!(slack_s >= 0.0)) throw std::invalid_argument("slack must be >= 0");
  const double limit = geom.transit_s();
  if (std::abs(delay_s) > limit + slack_s)
    throw std::invalid_argument("delay exceeds the link transit time");
  LocalizationResult r;
  r.delay_s = delay_s;
  r.raw_position_from_bob_km = 0.5 * (geom.length_km + geom.light_speed_km_per_s * delay_s);
  r.clamped = std::abs(delay_s) > limit;
  r.position_from_bob_km = std::clamp(r.raw_position_from_bob_km, 0.0, geom.length_km);
  r.position_from_alice_km = geom.length_km - r.position_from_bob_km;
  return r;
}

}  // namespace snstf
