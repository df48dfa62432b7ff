#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "snstf/rng.hpp"
#include "snstf/trace_io.hpp"

namespace snstf::cli {

namespace {

SessionTally session_tally(const RunConfig& cfg) {
  if (cfg.run.mode == SimMode::expected)
    return expected_tallies(cfg.link, cfg.det, cfg.src, cfg.run.n_total, cfg.protocol);
  return monte_carlo_session(cfg.link, cfg.det, cfg.src, cfg.run.pulses, cfg.run.seed, cfg.protocol);
}

const char* mode_name(SimMode m) { return m == SimMode::expected ? "expected" : "monte_carlo"; }

Table keyrate_record(const char* input, const KeyRateReport& r, const SecurityParams& sec) {
  const auto t = key_rate_terms(r, sec);
  const bool clamped = r.rate_per_pulse < 0.0;
  return Table::record({
      {"input", std::string(input)},
      {"n1_prime", r.n1_prime},
      {"e1_ph", r.e1_ph},
      {"nt_prime", r.nt_prime},
      {"e_z", r.e_z},
      {"n_total", r.n_total},
      {"h_e1_ph", binary_entropy(r.e1_ph)},
      {"h_e_z", binary_entropy(r.e_z)},
      {"untagged_bits", t.untagged_entropy},
      {"error_correction_bits", t.error_correction},
      {"correctness_bits", t.correctness},
      {"privacy_bits", t.privacy},
      {"net_bits", t.net_bits()},
      {"rate_per_pulse", r.rate_per_pulse},
      {"rate_bps", r.rate_bps},
      {"rate_clamped", clamped},
      {"display_rate_per_pulse", clamped ? 0.0 : r.rate_per_pulse},
      {"display_rate_bps", clamped ? 0.0 : r.rate_bps},
  });
}

Table source_record(const SourceParams& p) {
  return Table::record({
      {"mu1", p.mu1},
      {"mu2", p.mu2},
      {"muz", p.muz},
      {"p_decoy_window", p.p_decoy_window},
      {"p_signal_window", p.p_signal_window},
      {"p_mu1", p.p_mu1},
      {"p_mu2", p.p_mu2},
      {"p_vac", p.p_vac},
      {"epsilon_send", p.epsilon_send},
      {"misalignment", p.misalignment},
  });
}

// A lossless channel has unbounded capacity.
double capacity(double eta) {
  return eta >= 1.0 ? std::numeric_limits<double>::infinity() : plob_bound(eta);
}

}  // namespace

double fiber_loss_db(const LinkModel& link) {
  return link.total_length_km() * link.atten_db_per_km;
}

std::vector<Output> cmd_keyrate(const RunConfig& cfg) {
  if (cfg.keyrate)
    return {{"keyrate", keyrate_record("table", with_rates(*cfg.keyrate, cfg.sec, cfg.det.pulse_rate_hz),
                                       cfg.sec)}};
  const auto tally = session_tally(cfg);
  if (!decoy_bounds(tally, cfg.src, cfg.sec).feasible)
    throw InfeasibleError("decoy analysis is infeasible for this configuration (no single-photon yield bound)");
  const auto report = analyze_tally(tally, cfg.src, cfg.sec, cfg.det.pulse_rate_hz);
  return {{"keyrate", keyrate_record(mode_name(cfg.run.mode), report, cfg.sec)}};
}

std::vector<Output> cmd_simulate(const RunConfig& cfg) {
  const auto tally = session_tally(cfg);
  tally.check_invariants();

  Table rows;
  rows.columns = {"alice_slot", "bob_slot", "pulses", "events", "errors",
                  "slice_pulses", "slice_events", "single_photon_events"};
  for (Slot a : kAllSlots)
    for (Slot b : kAllSlots) {
      const auto& r = tally.at(a, b);
      rows.add_row({std::string(slot_name(a)), std::string(slot_name(b)), r.pulses, r.events,
                    r.errors, r.slice_pulses, r.slice_events, r.single_photon_events});
    }

  const auto decoy = decoy_bounds(tally, cfg.src, cfg.sec);
  std::vector<std::pair<std::string, Value>> summary = {
      {"mode", std::string(mode_name(cfg.run.mode))},
      {"seed", static_cast<std::int64_t>(cfg.run.seed)},
      {"pulses", tally.total_pulses()},
      {"events", tally.total_events()},
      {"z_events", tally.z_events()},
      {"z_qber", tally.z_qber()},
      {"x_qber", tally.x_qber()},
      {"true_untagged", tally.true_untagged()},
      {"n1_lower", decoy.n1_lower},
      {"e1ph_upper", decoy.e1ph_upper},
      {"decoy_feasible", decoy.feasible},
  };
  if (cfg.run.mode == SimMode::monte_carlo) {
    const auto res = aopp(tally.z_bits_alice, tally.z_bits_bob, mix64(cfg.run.seed));
    summary.emplace_back("aopp_pairs", static_cast<std::int64_t>(res.pairs_formed));
    summary.emplace_back("aopp_survived", static_cast<std::int64_t>(res.survived));
    summary.emplace_back("aopp_qber", error_rate(res.bits_a, res.bits_b));
  } else {
    const auto e = expected_aopp(tally, decoy);
    summary.emplace_back("aopp_pairs", e.pairs);
    summary.emplace_back("aopp_survived", e.survived);
    summary.emplace_back("aopp_qber", e.e_z);
  }
  return {{"simulate_tally", std::move(rows)}, {"simulate_summary", Table::record(std::move(summary))}};
}

std::vector<Output> cmd_curve(const RunConfig& cfg) {
  std::vector<double> grid = cfg.curve.distances_km;
  if (grid.empty())
    for (double d = 0.0; d <= 700.0; d += 50.0) grid.push_back(d);

  Table t;
  t.columns = {"distance_km", "loss_db", "simulated_rate", "feasible", "plob_absolute",
               "plob_relative"};
  std::vector<std::vector<Value>> rows(grid.size());
  const EvalSetup base = cfg.eval_setup();
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EvalSetup s = base;
    s.link = cfg.link.with_total_length(grid[i]);
    const double loss = fiber_loss_db(s.link);
    const double rate = evaluate(cfg.src, s);
    // Relative bound: station loss and detector efficiency included.
    const double eta_rel = transmittance(loss + 2.0 * s.link.station_loss_db) * cfg.det.efficiency;
    rows[i] = {grid[i], loss, rate, rate != kInfeasibleRate, capacity(transmittance(loss)),
               capacity(eta_rel)};
  }
  for (auto& r : rows) t.add_row(std::move(r));
  return {{"curve", std::move(t)}};
}

std::vector<Output> cmd_optimize(const RunConfig& cfg) {
  const SearchSpace space =
      cfg.optimize.around > 0.0 ? SearchSpace::around(cfg.src, cfg.optimize.around) : SearchSpace{};
  OptimizeOptions opts;
  opts.starts = cfg.optimize.starts;
  opts.base = cfg.src;
  const auto res = optimize_params(space, cfg.eval_setup(), cfg.optimize.budget, cfg.run.seed, opts);
  if (!res.feasible) throw InfeasibleError("every evaluated parameter set is decoy-infeasible");
  Table t = source_record(res.best_params);
  t.columns.insert(t.columns.begin(), {"best_rate", "best_rate_bps", "best_start", "evaluations"});
  t.rows[0].insert(t.rows[0].begin(),
                   {res.best_rate, res.best_rate * cfg.det.pulse_rate_hz,
                    static_cast<std::int64_t>(res.best_start), static_cast<std::int64_t>(res.evaluations)});
  return {{"optimize", std::move(t)}};
}

std::vector<Output> cmd_sense(const RunConfig& cfg) {
  const auto& s = cfg.sensing;
  const auto traces = simulate_phase_traces(s.geometry, cfg.vibrations, s.simulation);
  const double fs = s.simulation.sample_rate_hz;

  PhaseTrace recovered;
  if (s.recovery == Recovery::reference) {
    std::vector<double> phase(traces.alice.samples);
    for (double& v : phase) v += s.reference_bias_rad;
    const auto frames = synthesize_reference_counts(phase, s.photons_per_frame,
                                                    substream_seed(cfg.run.seed, 1));
    recovered = recover_phase_from_reference(frames, fs, TraceOrigin::alice);
  } else {
    recovered = traces.alice;
  }

  DelayEstimate delay;
  try {
    delay = cross_correlate_delay(traces.alice, traces.bob, s.geometry.transit_s());
  } catch (const DegenerateTraceError& e) {
    throw InfeasibleError(std::string("cannot localize: ") + e.what());
  }
  const auto loc = locate(delay.delay_s, s.geometry, 1.0 / fs);

  std::vector<std::pair<std::string, Value>> fields = {
      {"scenario", cfg.run.scenario},
      {"delay_s", loc.delay_s},
      {"lag_samples", static_cast<std::int64_t>(delay.lag_samples)},
      {"position_from_bob_km", loc.position_from_bob_km},
      {"position_from_alice_km", loc.position_from_alice_km},
      {"raw_position_from_bob_km", loc.raw_position_from_bob_km},
      {"correlation_peak", delay.correlation_peak},
      {"clamped", loc.clamped},
  };
  if (!cfg.vibrations.empty()) {
    const double f0 = cfg.vibrations.front().frequency_hz();
    const double lo = f0 / 2.0;
    const double hi = std::min(2.0 * f0, fs / 2.0);
    fields.emplace_back("injected_frequency_hz", f0);
    fields.emplace_back("recovered_peak_hz", dominant_frequency(recovered.samples, fs, lo, hi));
  }

  if (!cfg.run.out.empty()) {
    const std::filesystem::path dir(cfg.run.out);
    std::filesystem::create_directories(dir);
    write_trace(dir / "alice.trace", traces.alice);
    write_trace(dir / "bob.trace", traces.bob);
    write_trace(dir / "recovered.trace", recovered);
  }
  return {{"sense", Table::record(std::move(fields))}};
}

std::vector<Output> cmd_plob(double loss_db) {
  const double eta = transmittance(loss_db);
  return {{"plob", Table::record({{"loss_db", loss_db},
                                  {"eta", eta},
                                  {"plob_bound", plob_bound(eta)},
                                  {"linear_approx", eta / std::log(2.0)}})}};
}

void emit(const std::vector<Output>& outputs, const std::string& out, Format f, std::ostream& os) {
  if (out.empty()) {
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (i) os << '\n';
      write_table(os, outputs[i].table, f);
    }
    return;
  }
  const std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  for (const auto& o : outputs) {
    const auto path = dir / (o.name + "." + format_extension(f));
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    write_table(file, o.table, f);
  }
}

}  // namespace snstf::cli
