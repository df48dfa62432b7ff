// snstf: command-line front end.
//
//   snstf keyrate  [--config run.ini]      finite-key rate with every term
//   snstf simulate [--config run.ini]      Monte Carlo or expected tallies
//   snstf curve    [--config run.ini]      rate and PLOB bounds vs distance
//   snstf optimize [--config run.ini]      best source parameters
//   snstf sense    [--config run.ini]      vibration traces and localization
//   snstf plob     [--loss-db 106]         repeaterless bound
//
// Exit codes: 0 success (a negative key rate included), 2 invalid
// configuration, 3 no result exists for a valid configuration.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "record.hpp"

using namespace snstf::cli;

int main(int argc, char** argv) {
  CLI::App app{"Sending-or-not-sending twin-field QKD lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (overrides [run] seed)");
  app.add_option("--out", out, "output directory (default: standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* keyrate = app.add_subcommand("keyrate", "finite-key secure rate");
  auto* simulate = app.add_subcommand("simulate", "session tallies");
  auto* curve = app.add_subcommand("curve", "rate versus distance");
  auto* optimize = app.add_subcommand("optimize", "optimize source parameters");
  auto* sense = app.add_subcommand("sense", "vibration sensing scenario");
  auto* plob = app.add_subcommand("plob", "repeaterless (PLOB) bound");
  std::optional<double> loss_db;
  plob->add_option("--loss-db", loss_db, "channel loss in dB (default: configured fiber loss)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.run.seed = *seed;
    if (out) cfg.run.out = *out;
    if (format) cfg.run.format = *format;
    cfg.validate();
    const Format fmt = parse_format(cfg.run.format);

    std::vector<Output> outputs;
    if (keyrate->parsed()) outputs = cmd_keyrate(cfg);
    else if (simulate->parsed()) outputs = cmd_simulate(cfg);
    else if (curve->parsed()) outputs = cmd_curve(cfg);
    else if (optimize->parsed()) outputs = cmd_optimize(cfg);
    else if (sense->parsed()) outputs = cmd_sense(cfg);
    else if (plob->parsed()) outputs = cmd_plob(loss_db.value_or(fiber_loss_db(cfg.link)));
    emit(outputs, cfg.run.out, fmt, std::cout);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
