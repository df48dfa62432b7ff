#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "snstf/simulate.hpp"

namespace snstf {

namespace {

constexpr double kPi = std::numbers::pi;

const std::array<double, kQuadraturePoints>& full_circle_cosines() {
  static const auto table = [] {
    std::array<double, kQuadraturePoints> c{};
    for (int j = 0; j < kQuadraturePoints; ++j)
      c[j] = std::cos(2.0 * kPi * (j + 0.5) / kQuadraturePoints);
    return c;
  }();
  return table;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Accumulates exclusive click probabilities given cos(theta) and a weight.
struct Accumulator {
  double half_sum;   // (x + y) / 2
  double cross;      // sqrt(x y)
  double no_noise;   // 1 - noise
  ClickProbabilities acc{};

  void add(double cos_theta, double w) {
    const double q_left = no_noise * std::exp(-(half_sum + cross * cos_theta));
    const double q_right = no_noise * std::exp(-(half_sum - cross * cos_theta));
    acc.left += w * (1.0 - q_left) * q_right;
    acc.right += w * q_left * (1.0 - q_right);
    acc.both += w * (1.0 - q_left) * (1.0 - q_right);
  }
};

void check_arrived(double a, double b, double noise) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("intensities must be >= 0");
  if (!(noise >= 0.0 && noise < 1.0)) throw std::invalid_argument("noise must be in [0,1)");
}

}  // namespace

ClickProbabilities click_probabilities_at(double arrived_a, double arrived_b, double theta,
                                          double noise) {
  check_arrived(arrived_a, arrived_b, noise);
  Accumulator a{0.5 * (arrived_a + arrived_b), std::sqrt(arrived_a * arrived_b), 1.0 - noise};
  a.add(std::cos(theta), 1.0);
  return a.acc;
}

ClickProbabilities click_probabilities(double intens_a, double intens_b, double eta_a,
                                       double eta_b, double phase_sigma, double noise) {
  if (!(eta_a >= 0.0 && eta_a <= 1.0) || !(eta_b >= 0.0 && eta_b <= 1.0))
    throw std::invalid_argument("eta must be in [0,1]");
  if (!(phase_sigma >= 0.0)) throw std::invalid_argument("phase_sigma must be >= 0");
  // A uniform phase convolved with any jitter is still uniform.
  return sliced_click_probabilities(intens_a * eta_a, intens_b * eta_b, phase_sigma, kPi, noise);
}

PhaseQuadrature PhaseQuadrature::full_circle() {
  PhaseQuadrature q;
  const auto& c = full_circle_cosines();
  q.cos_theta.assign(c.begin(), c.end());
  q.weight.assign(kQuadraturePoints, 1.0 / kQuadraturePoints);
  return q;
}

PhaseQuadrature PhaseQuadrature::slice(double phase_sigma, double half_width) {
  if (!(half_width > 0.0 && half_width <= kPi))
    throw std::invalid_argument("slice half-width must be in (0, pi]");
  if (!(phase_sigma >= 0.0)) throw std::invalid_argument("phase_sigma must be >= 0");
  if (half_width >= kPi) return full_circle();

  PhaseQuadrature q;
  q.cos_theta.resize(kQuadraturePoints);
  q.weight.resize(kQuadraturePoints);
  if (phase_sigma <= 0.0) {
    for (int j = 0; j < kQuadraturePoints; ++j) {
      q.cos_theta[j] = std::cos(-half_width + 2.0 * half_width * (j + 0.5) / kQuadraturePoints);
      q.weight[j] = 1.0 / kQuadraturePoints;
    }
    return q;
  }

  // Density of the jittered phase: uniform slice convolved with a Gaussian,
  // wrapped onto the circle when the support exceeds it.
  const double support = half_width + 8.0 * phase_sigma;
  const bool wrap = support >= kPi;
  const double lo = wrap ? -kPi : -support;
  const double span = wrap ? 2.0 * kPi : 2.0 * support;
  const int wraps = wrap ? static_cast<int>(std::ceil(support / (2.0 * kPi))) + 1 : 0;

  double total = 0.0;
  for (int j = 0; j < kQuadraturePoints; ++j) {
    const double theta = lo + span * (j + 0.5) / kQuadraturePoints;
    double g = 0.0;
    for (int k = -wraps; k <= wraps; ++k) {
      const double t = theta + 2.0 * kPi * k;
      g += normal_cdf((t + half_width) / phase_sigma) - normal_cdf((t - half_width) / phase_sigma);
    }
    q.cos_theta[j] = std::cos(theta);
    q.weight[j] = g;
    total += g;
  }
  for (double& w : q.weight) w /= total;
  return q;
}

ClickProbabilities average_clicks(double arrived_a, double arrived_b, double noise,
                                  const PhaseQuadrature& quad) {
  check_arrived(arrived_a, arrived_b, noise);
  Accumulator a{0.5 * (arrived_a + arrived_b), std::sqrt(arrived_a * arrived_b), 1.0 - noise};
  if (a.cross == 0.0) {
    a.add(0.0, 1.0);  // no interference term
    return a.acc;
  }
  for (std::size_t j = 0; j < quad.cos_theta.size(); ++j) a.add(quad.cos_theta[j], quad.weight[j]);
  return a.acc;
}

ClickProbabilities sliced_click_probabilities(double arrived_a, double arrived_b,
                                              double phase_sigma, double half_width,
                                              double noise) {
  if (half_width == kPi) {
    static const PhaseQuadrature full = PhaseQuadrature::full_circle();
    return average_clicks(arrived_a, arrived_b, noise, full);
  }
  return average_clicks(arrived_a, arrived_b, noise, PhaseQuadrature::slice(phase_sigma, half_width));
}

double slice_acceptance(double half_width) { return 2.0 * half_width / kPi; }

}  // namespace snstf
