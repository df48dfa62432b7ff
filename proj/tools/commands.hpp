#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "record.hpp"

namespace snstf::cli {

struct Output {
  std::string name;  // file stem under the output directory
  Table table;
};

std::vector<Output> cmd_keyrate(const RunConfig& cfg);
std::vector<Output> cmd_simulate(const RunConfig& cfg);
std::vector<Output> cmd_curve(const RunConfig& cfg);
std::vector<Output> cmd_optimize(const RunConfig& cfg);
/// Writes alice.trace, bob.trace and recovered.trace when cfg.run.out is set.
std::vector<Output> cmd_sense(const RunConfig& cfg);
std::vector<Output> cmd_plob(double loss_db);

/// Fiber loss of the configured link, station losses excluded.
double fiber_loss_db(const LinkModel& link);

/// Writes each output to <out>/<name>.<ext>, or to `os` when out is empty.
void emit(const std::vector<Output>& outputs, const std::string& out, Format f, std::ostream& os);

}  // namespace snstf::cli
