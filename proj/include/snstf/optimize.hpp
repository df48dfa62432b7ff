#pragma once

// Derivative-free search over SNS source parameters for the best expected
// finite-key rate on a given link.

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "snstf/core.hpp"
#include "snstf/security.hpp"
#include "snstf/simulate.hpp"

namespace snstf {

/// Returned by evaluate() for parameter sets the decoy analysis cannot use.
inline constexpr double kInfeasibleRate = -1.0e3;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SearchSpace {
  static constexpr int kDims = 7;

  Interval mu1{0.02, 0.3};
  Interval mu2{0.1, 0.8};
  Interval muz{0.1, 0.8};
  Interval p_signal_window{0.3, 0.95};
  Interval p_mu1{0.05, 0.9};
  Interval p_mu2{0.01, 0.5};
  Interval epsilon_send{0.05, 0.5};

  void validate() const;

  std::array<Interval, kDims> intervals() const {
    return {mu1, mu2, muz, p_signal_window, p_mu1, p_mu2, epsilon_send};
  }

  /// Maps unit-cube coordinates onto a parameter set; `base` supplies the
  /// non-searched fields (misalignment).
  SourceParams to_params(const std::array<double, kDims>& unit, const SourceParams& base) const;
  std::array<double, kDims> to_unit(const SourceParams& p) const;

  /// Box of +/- rel around a point, intersected with physical ranges.
  static SearchSpace around(const SourceParams& p, double rel);
};

struct EvalSetup {
  LinkModel link;
  DetectorModel det;
  SecurityParams sec;
  double n_pulses = 1.007e13;
  ProtocolOptions protocol;
};

/// Expected tallies -> decoy bounds -> expected AOPP -> finite-key rate.
/// kInfeasibleRate for invalid or decoy-infeasible parameters.
double evaluate(const SourceParams& params, const EvalSetup& setup);

struct OptimizeOptions {
  int starts = 8;
  double initial_step = 0.25;  // in unit-cube coordinates
  double min_step = 1e-4;
  /// Explicit start points; replaces the Latin-hypercube draw when set.
  std::vector<SourceParams> start_points;
  /// Supplies fields the search does not touch.
  SourceParams base;
  int threads = 0;
};

struct OptimizeResult {
  SourceParams best_params;
  double best_rate = -std::numeric_limits<double>::infinity();
  int best_start = -1;
  long evaluations = 0;
  bool feasible = false;
  std::vector<double> start_rates;  // rate at each start point
};

/// Multi-start coordinate descent with step halving. The budget is split
/// evenly across starts up front, so results do not depend on thread count.
OptimizeResult optimize_params(const SearchSpace& space, const EvalSetup& setup, long budget,
                               std::uint64_t seed, const OptimizeOptions& opts = {});

/// Latin-hypercube sample of n points in the unit cube.
std::vector<std::array<double, SearchSpace::kDims>> latin_hypercube(int n, std::uint64_t seed);

}  // namespace snstf
