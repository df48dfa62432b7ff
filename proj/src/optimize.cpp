#include "snstf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "snstf/rng.hpp"

namespace snstf {

void SearchSpace::validate() const {
  for (const auto& iv : intervals())
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi))
      throw std::invalid_argument("search interval is empty");
  auto unit = [](const Interval& iv, const char* what) {
    if (iv.lo < 0.0 || iv.hi > 1.0) throw std::invalid_argument(what);
  };
  if (mu1.lo <= 0.0) throw std::invalid_argument("mu1 interval must be positive");
  if (mu2.hi <= mu1.lo) throw std::invalid_argument("mu2 interval admits no point above mu1");
  if (muz.lo < 0.0) throw std::invalid_argument("muz interval must be >= 0");
  unit(p_signal_window, "p_signal_window interval outside [0,1]");
  unit(p_mu1, "p_mu1 interval outside [0,1]");
  unit(p_mu2, "p_mu2 interval outside [0,1]");
  unit(epsilon_send, "epsilon_send interval outside [0,1]");
}

SourceParams SearchSpace::to_params(const std::array<double, kDims>& u,
                                    const SourceParams& base) const {
  const auto iv = intervals();
  std::array<double, kDims> v{};
  for (int d = 0; d < kDims; ++d) v[d] = iv[d].lo + std::clamp(u[d], 0.0, 1.0) * (iv[d].hi - iv[d].lo);
  SourceParams p = base;
  p.mu1 = v[0];
  p.mu2 = v[1];
  p.muz = v[2];
  p.p_signal_window = v[3];
  p.p_decoy_window = 1.0 - v[3];
  p.p_mu1 = v[4];
  p.p_mu2 = v[5];
  p.p_vac = 1.0 - v[4] - v[5];
  p.epsilon_send = v[6];
  return p;
}

std::array<double, SearchSpace::kDims> SearchSpace::to_unit(const SourceParams& p) const {
  const auto iv = intervals();
  const std::array<double, kDims> v = {p.mu1,   p.mu2,   p.muz,         p.p_signal_window,
                                       p.p_mu1, p.p_mu2, p.epsilon_send};
  std::array<double, kDims> u{};
  for (int d = 0; d < kDims; ++d) {
    const double w = iv[d].hi - iv[d].lo;
    u[d] = w > 0.0 ? std::clamp((v[d] - iv[d].lo) / w, 0.0, 1.0) : 0.0;
  }
  return u;
}

SearchSpace SearchSpace::around(const SourceParams& p, double rel) {
  auto box = [rel](double v, double lo, double hi) {
    return Interval{std::max(lo, v * (1.0 - rel)), std::min(hi, v * (1.0 + rel))};
  };
  SearchSpace s;
  s.mu1 = box(p.mu1, 1e-6, 10.0);
  s.mu2 = box(p.mu2, 1e-6, 10.0);
  s.muz = box(p.muz, 0.0, 10.0);
  s.p_signal_window = box(p.p_signal_window, 0.0, 1.0);
  s.p_mu1 = box(p.p_mu1, 0.0, 1.0);
  s.p_mu2 = box(p.p_mu2, 0.0, 1.0);
  s.epsilon_send = box(p.epsilon_send, 0.0, 1.0);
  return s;
}

double evaluate(const SourceParams& params, const EvalSetup& setup) {
  try {
    params.validate();
  } catch (const std::invalid_argument&) {
    return kInfeasibleRate;
  }
  const auto tally = expected_tallies(setup.link, setup.det, params, setup.n_pulses, setup.protocol);
  const auto decoy = decoy_bounds(tally, params, setup.sec);
  if (!decoy.feasible) return kInfeasibleRate;
  return analyze_tally(tally, params, setup.sec, setup.det.pulse_rate_hz).rate_per_pulse;
}

std::vector<std::array<double, SearchSpace::kDims>> latin_hypercube(int n, std::uint64_t seed) {
  std::vector<std::array<double, SearchSpace::kDims>> pts(n);
  Rng rng(seed);
  std::vector<int> perm(n);
  for (int d = 0; d < SearchSpace::kDims; ++d) {
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (int i = 0; i < n; ++i) pts[i][d] = (perm[i] + rng.uniform()) / n;
  }
  return pts;
}

namespace {

struct StartOutcome {
  std::array<double, SearchSpace::kDims> best{};
  double start_rate = kInfeasibleRate;
  double best_rate = kInfeasibleRate;
  long used = 0;
};

StartOutcome descend(const SearchSpace& space, const EvalSetup& setup, const SourceParams& base,
                     std::array<double, SearchSpace::kDims> u, long share,
                     const OptimizeOptions& opts) {
  const auto iv = space.intervals();
  StartOutcome out;
  out.best = u;
  out.best_rate = out.start_rate = evaluate(space.to_params(u, base), setup);
  out.used = 1;

  double step = opts.initial_step;
  while (out.used < share && step >= opts.min_step) {
    bool improved = false;
    for (int d = 0; d < SearchSpace::kDims && out.used < share; ++d) {
      if (iv[d].hi <= iv[d].lo) continue;
      for (double sign : {1.0, -1.0}) {
        if (out.used >= share) break;
        auto v = out.best;
        v[d] = std::clamp(v[d] + sign * step, 0.0, 1.0);
        if (v[d] == out.best[d]) continue;
        const double r = evaluate(space.to_params(v, base), setup);
        ++out.used;
        if (r > out.best_rate) {
          out.best = v;
          out.best_rate = r;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return out;
}

}  // namespace

OptimizeResult optimize_params(const SearchSpace& space, const EvalSetup& setup, long budget,
                               std::uint64_t seed, const OptimizeOptions& opts) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  space.validate();

  std::vector<std::array<double, SearchSpace::kDims>> starts;
  if (!opts.start_points.empty()) {
    for (const auto& p : opts.start_points) starts.push_back(space.to_unit(p));
  } else {
    starts = latin_hypercube(std::max(1, opts.starts), seed);
  }
  const long n_starts = std::min<long>(budget, static_cast<long>(starts.size()));
  starts.resize(n_starts);

  std::vector<StartOutcome> outcomes(n_starts);
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long s = 0; s < n_starts; ++s) {
    const long share = budget / n_starts + (s < budget % n_starts ? 1 : 0);
    outcomes[s] = descend(space, setup, opts.base, starts[s], share, opts);
  }

  OptimizeResult res;
  for (long s = 0; s < n_starts; ++s) {
    const auto& o = outcomes[s];
    res.evaluations += o.used;
    res.start_rates.push_back(o.start_rate);
    // Strict comparison: ties keep the lowest start index.
    if (res.best_start < 0 || o.best_rate > res.best_rate) {
      res.best_rate = o.best_rate;
      res.best_params = space.to_params(o.best, opts.base);
      res.best_start = static_cast<int>(s);
    }
  }
  res.feasible = res.best_rate > kInfeasibleRate;
  if (!res.feasible) res.best_rate = -std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace snstf
