#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "record.hpp"

using namespace snstf::cli;
namespace fs = std::filesystem;

namespace {

const char* kTableOne = R"(
[keyrate]
n1_prime = 244731
e1_ph = 0.1336
nt_prime = 558729
e_z = 0.0212
n_total = 1.007e13
)";

RunConfig config(const std::string& text) {
  std::istringstream is(text);
  RunConfig c = parse_config(is);
  c.validate();
  return c;
}

std::string error_of(const std::string& text) {
  try {
    config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("snstf_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream s;
  s << is.rdbuf();
  return s.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + SNSTF_EXE + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSense200 = R"(
[run]
scenario = alice200
seed = 3
[sensing]
length_km = 200
sample_rate_hz = 200000
duration_s = 0.05
[vibration]
position_km = 0
waveform = dc_plus_sinusoid
frequency_hz = 1000
offset_rad = 1
amplitude_rad = 0.5
start_s = 0.02
duration_s = 0.01
)";

}  // namespace

TEST_CASE("config errors name the field") {
  CHECK(error_of("[link]\nfoo = 1\n").find("link.foo") != std::string::npos);
  CHECK(error_of("[bogus]\nx = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[link]\nnoise_per_pulse = 2\n").find("link.noise_per_pulse") != std::string::npos);
  CHECK(error_of("[source]\nmu1 = abc\n").find("source.mu1") != std::string::npos);
  CHECK(error_of("[keyrate]\nn1_prime = 1\n").find("keyrate.e1_ph") != std::string::npos);
  CHECK(error_of("[run]\nformat = xml\n").find("xml") != std::string::npos);
  CHECK(error_of("[link]\nlength_a_km = 1\nlength_a_km = 2\n") != "");
  CHECK(error_of("[vibration]\nwaveform = square\n").find("vibration.waveform") != std::string::npos);
  CHECK(error_of("[sensing]\nsample_rate_hz = 100\n[vibration]\nfrequency_hz = 80\n")
            .find("alias") != std::string::npos);
  CHECK(error_of("; comment\n[run]\nseed = 4 \n") == "");
}

TEST_CASE("keyrate on the published aggregates") {
  const auto out = cmd_keyrate(config(kTableOne));
  REQUIRE(out.size() == 1);
  const auto& t = out[0].table;
  CHECK(std::abs(t.number("rate_per_pulse") / 9.22e-10 - 1.0) <= 0.10);
  CHECK(std::abs(t.number("rate_bps") / 0.092 - 1.0) <= 0.10);
  CHECK(t.number("h_e1_ph") == doctest::Approx(0.5672291801550614));
  CHECK(std::get<bool>(t.get("rate_clamped")) == false);
  const double net = t.number("untagged_bits") - t.number("error_correction_bits") -
                     t.number("correctness_bits") - t.number("privacy_bits");
  CHECK(net == doctest::Approx(t.number("net_bits")));
}

TEST_CASE("a negative rate is reported and flagged") {
  std::string text = kTableOne;
  text.replace(text.find("244731"), 6, "0");
  const auto t = cmd_keyrate(config(text))[0].table;
  CHECK(t.number("rate_per_pulse") < 0.0);
  CHECK(std::get<bool>(t.get("rate_clamped")));
  CHECK(t.number("display_rate_per_pulse") == 0.0);
}

TEST_CASE("reports round trip through both formats") {
  RunConfig c = config("[run]\nmode = expected\n");
  std::vector<Output> outs = cmd_simulate(c);
  for (const auto& o : cmd_keyrate(config(kTableOne))) outs.push_back(o);
  for (const auto& o : cmd_plob(106.0)) outs.push_back(o);
  for (const auto& o : outs) {
    for (Format f : {Format::csv, Format::json}) {
      const std::string text = to_string(o.table, f);
      CHECK(to_string(parse_table(text, f), f) == text);
    }
  }
  CHECK_THROWS_AS(parse_table("a,b\n1\n", Format::csv), std::runtime_error);
}

TEST_CASE("numbers are written in shortest round-trip form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(std::stod(format_number(2.0 / 3.0)) == 2.0 / 3.0);
}

TEST_CASE("curve columns are monotone and bounded") {
  RunConfig c = config("[curve]\ndistances_km = 0, 100, 300, 500, 658.7, 700\n");
  const auto t = cmd_curve(c)[0].table;
  REQUIRE(t.rows.size() == 6);
  double prev = INFINITY;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double r = t.number("simulated_rate", i);
    CHECK(r <= prev);
    prev = r;
    CHECK(t.number("plob_absolute", i) >= t.number("plob_relative", i));
  }
  CHECK(t.number("simulated_rate", 4) > 0.0);
  CHECK(t.number("simulated_rate", 4) > t.number("plob_absolute", 4));
  CHECK(std::isinf(t.number("plob_absolute", 0)));
  CHECK(t.number("loss_db", 4) == doctest::Approx(106.05).epsilon(1e-4));
}

TEST_CASE("sense locates a source at Alice on 200 km") {
  const auto t = cmd_sense(config(kSense200))[0].table;
  CHECK(std::abs(t.number("delay_s") - 1e-3) <= 5e-6);
  CHECK(std::abs(t.number("position_from_bob_km") - 200.0) <= 1.0);
  CHECK(std::abs(t.number("recovered_peak_hz") / 1000.0 - 1.0) <= 0.01);
}

TEST_CASE("sense at the midpoint reports zero delay") {
  std::string text = kSense200;
  text.replace(text.find("position_km = 0"), 15, "position_km = 100");
  const auto t = cmd_sense(config(text))[0].table;
  CHECK(std::abs(t.number("delay_s")) < 1e-7);
  CHECK(t.number("position_from_bob_km") == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("a flat scene is infeasible to localize") {
  CHECK_THROWS_AS(cmd_sense(config("[sensing]\nduration_s = 0.01\n")), InfeasibleError);
}

TEST_CASE("plob record") {
  const auto t = cmd_plob(106.0)[0].table;
  CHECK(t.number("plob_bound") == doctest::Approx(3.6239e-11).epsilon(1e-4));
}

TEST_CASE("executable: exit codes and byte-identical output") {
  const auto dir = scratch("exe");
  {
    std::ofstream(dir / "table1.ini") << kTableOne;
    std::ofstream(dir / "bad.ini") << "[link]\nnoise_per_pulse = -1\n";
    std::ofstream(dir / "flat.ini") << "[sensing]\nduration_s = 0.01\n";
    std::ofstream(dir / "sense.ini") << kSense200;
  }
  const std::string cfg = "--config \"" + (dir / "table1.ini").string() + "\" ";
  CHECK(run(cfg + "keyrate") == 0);
  CHECK(run("--config \"" + (dir / "bad.ini").string() + "\" keyrate") == 2);
  CHECK(run("--config \"" + (dir / "missing.ini").string() + "\" keyrate") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--config \"" + (dir / "flat.ini").string() + "\" sense") == 3);
  CHECK(run("plob --loss-db 106") == 0);

  for (const char* fmt : {"csv", "json"}) {
    const auto a = dir / (std::string("a_") + fmt);
    const auto b = dir / (std::string("b_") + fmt);
    const std::string common = "--config \"" + (dir / "sense.ini").string() + "\" --format " + fmt;
    REQUIRE(run(common + " --out \"" + a.string() + "\" sense") == 0);
    REQUIRE(run(common + " --out \"" + b.string() + "\" sense") == 0);
    for (const char* name : {"alice.trace", "bob.trace", "recovered.trace"})
      CHECK(slurp(a / name) == slurp(b / name));
    const std::string report = std::string("sense.") + fmt;
    CHECK(!slurp(a / report).empty());
    CHECK(slurp(a / report) == slurp(b / report));
  }

  const auto m1 = dir / "mc1", m2 = dir / "mc2";
  REQUIRE(run("--seed 9 --out \"" + m1.string() + "\" simulate") == 0);
  REQUIRE(run("--seed 9 --out \"" + m2.string() + "\" simulate") == 0);
  CHECK(slurp(m1 / "simulate_tally.csv") == slurp(m2 / "simulate_tally.csv"));
  CHECK(slurp(m1 / "simulate_summary.csv") == slurp(m2 / "simulate_summary.csv"));
  fs::remove_all(dir);
}
