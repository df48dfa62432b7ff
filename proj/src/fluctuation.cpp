#include <cmath>
#include <stdexcept>

#include "snstf/security.hpp"

namespace snstf {

namespace {

constexpr double kRelTol = 1e-12;
constexpr int kMaxIter = 2000;

// Poisson Chernoff exponent between an observation x and a mean mu:
// x - mu + x ln(mu / x). Zero at mu = x, negative elsewhere.
double chernoff_exponent(double x, double mu) {
  if (x == 0.0) return -mu;
  return x - mu + x * std::log(mu / x);
}

template <class F>
double bisect(F&& below_target, double lo, double hi) {
  for (int i = 0; i < kMaxIter && hi - lo > kRelTol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (below_target(mid)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ExpectationBounds fluctuation_bounds(double observed, double xi) {
  if (!(observed >= 0.0)) throw std::invalid_argument("observed count must be >= 0");
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must be in (0,1)");
  const double target = std::log(xi);
  ExpectationBounds b;

  if (observed > 0.0) {
    // Exponent rises from -inf at 0 to 0 at the observation.
    b.lower = bisect([&](double mu) { return chernoff_exponent(observed, mu) < target; }, 0.0,
                     observed);
  }
  double hi = observed + 1.0;
  while (chernoff_exponent(observed, hi) > target) hi *= 2.0;
  b.upper = bisect([&](double mu) { return chernoff_exponent(observed, mu) > target; }, observed,
                   hi);
  return b;
}

double observed_lower_from_expectation(double expectation, double xi) {
  if (!(expectation >= 0.0)) throw std::invalid_argument("expectation must be >= 0");
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must be in (0,1)");
  const double target = -std::log(xi);
  // Divergence E - x + x ln(x/E), decreasing from E at x = 0 to 0 at x = E.
  auto divergence = [&](double x) {
    return x == 0.0 ? expectation : expectation - x + x * std::log(x / expectation);
  };
  if (expectation == 0.0 || divergence(0.0) <= target) return 0.0;
  return bisect([&](double x) { return divergence(x) > target; }, 0.0, expectation);
}

}  // namespace snstf
