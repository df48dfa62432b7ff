#include "config.hpp"
#include "record.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace snstf::cli {

namespace pt = boost::property_tree;

namespace {

class SectionReader {
 public:
  SectionReader(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  const std::string* raw(const std::string& key) {
    seen_.insert(key);
    const auto it = tree_.find(key);
    return it == tree_.not_found() ? nullptr : &it->second.data();
  }

  void number(const std::string& key, double& out) {
    if (const auto* s = raw(key)) out = parse_double(*s, key);
  }

  void integer(const std::string& key, std::uint64_t& out) {
    if (const auto* s = raw(key)) {
      std::uint64_t v = 0;
      const auto r = std::from_chars(s->data(), s->data() + s->size(), v);
      if (r.ec != std::errc() || r.ptr != s->data() + s->size())
        throw ConfigError(field(key) + ": expected a non-negative integer, got '" + *s + "'");
      out = v;
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* s = raw(key)) out = *s;
  }

  void list(const std::string& key, std::vector<double>& out) {
    const auto* s = raw(key);
    if (!s) return;
    out.clear();
    std::size_t start = 0;
    while (true) {
      const auto comma = s->find(',', start);
      std::string item = s->substr(start, comma - start);
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
      out.push_back(parse_double(item, key));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  double required(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key) + " is required");
    double v = 0.0;
    number(key, v);
    return v;
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [key, child] : tree_) {
      if (!child.empty()) throw ConfigError(field(key) + ": nested keys are not supported");
      if (!seen_.count(key)) throw ConfigError("unknown key " + field(key));
    }
  }

 private:
  double parse_double(const std::string& s, const std::string& key) const {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError(field(key) + ": expected a number, got '" + s + "'");
    return v;
  }

  const pt::ptree& tree_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_run(SectionReader r, RunSection& run) {
  r.text("scenario", run.scenario);
  r.integer("seed", run.seed);
  std::string mode;
  r.text("mode", mode);
  if (mode == "expected") run.mode = SimMode::expected;
  else if (mode == "monte_carlo") run.mode = SimMode::monte_carlo;
  else if (!mode.empty()) throw ConfigError("run.mode must be expected or monte_carlo");
  r.integer("pulses", run.pulses);
  r.number("n_total", run.n_total);
  r.text("out", run.out);
  r.text("format", run.format);
  r.finish();
}

void read_link(SectionReader r, LinkModel& l) {
  r.number("length_a_km", l.length_a_km);
  r.number("length_b_km", l.length_b_km);
  r.number("atten_db_per_km", l.atten_db_per_km);
  r.number("station_loss_db", l.station_loss_db);
  r.number("noise_per_pulse", l.noise_per_pulse);
  r.finish();
}

void read_detector(SectionReader r, DetectorModel& d) {
  r.number("efficiency", d.efficiency);
  r.number("dark_rate_hz", d.dark_rate_hz);
  r.number("gate_ns", d.gate_ns);
  r.number("pulse_rate_hz", d.pulse_rate_hz);
  r.finish();
}

void read_source(SectionReader r, SourceParams& s) {
  r.number("mu1", s.mu1);
  r.number("mu2", s.mu2);
  r.number("muz", s.muz);
  r.number("p_decoy_window", s.p_decoy_window);
  r.number("p_signal_window", s.p_signal_window);
  r.number("p_mu1", s.p_mu1);
  r.number("p_mu2", s.p_mu2);
  r.number("p_vac", s.p_vac);
  r.number("epsilon_send", s.epsilon_send);
  r.number("misalignment", s.misalignment);
  r.finish();
}

void read_security(SectionReader r, SecurityParams& s) {
  r.number("f_ec", s.f_ec);
  r.number("eps_cor", s.eps_cor);
  r.number("eps_pa", s.eps_pa);
  r.number("eps_hat", s.eps_hat);
  r.number("xi_decoy", s.xi_decoy);
  r.finish();
}

KeyRateReport read_keyrate(SectionReader r) {
  KeyRateReport k;
  k.n1_prime = r.required("n1_prime");
  k.e1_ph = r.required("e1_ph");
  k.nt_prime = r.required("nt_prime");
  k.e_z = r.required("e_z");
  k.n_total = r.required("n_total");
  r.finish();
  return k;
}

void read_optimize(SectionReader r, OptimizeSection& o) {
  std::uint64_t budget = o.budget, starts = o.starts;
  r.integer("budget", budget);
  r.integer("starts", starts);
  r.number("around", o.around);
  r.finish();
  if (budget < 1 || budget > 100'000'000) throw ConfigError("optimize.budget must be in [1, 1e8]");
  if (starts < 1 || starts > 10'000) throw ConfigError("optimize.starts must be in [1, 10000]");
  o.budget = static_cast<long>(budget);
  o.starts = static_cast<int>(starts);
}

void read_sensing(SectionReader r, SensingSection& s) {
  r.number("length_km", s.geometry.length_km);
  r.number("light_speed_km_per_s", s.geometry.light_speed_km_per_s);
  r.number("sample_rate_hz", s.simulation.sample_rate_hz);
  r.number("duration_s", s.simulation.duration_s);
  r.number("drift_rate", s.simulation.drift_rate);
  r.number("noise_rad", s.simulation.noise_rad);
  std::string recovery;
  r.text("recovery", recovery);
  if (recovery == "reference") s.recovery = Recovery::reference;
  else if (recovery == "heterodyne") s.recovery = Recovery::heterodyne;
  else if (!recovery.empty()) throw ConfigError("sensing.recovery must be reference or heterodyne");
  r.number("photons_per_frame", s.photons_per_frame);
  r.number("reference_bias_rad", s.reference_bias_rad);
  r.finish();
}

VibrationSource read_vibration(SectionReader r) {
  VibrationSource v;
  r.number("position_km", v.position_km);
  r.number("start_s", v.start_s);
  r.number("duration_s", v.duration_s);
  std::string kind = "sinusoid";
  r.text("waveform", kind);
  if (kind == "sinusoid") {
    Sinusoid s;
    r.number("frequency_hz", s.frequency_hz);
    r.number("amplitude_rad", s.amplitude_rad);
    r.number("phase_rad", s.phase_rad);
    v.waveform = s;
  } else if (kind == "dc_plus_sinusoid") {
    DcPlusSinusoid s;
    r.number("offset_rad", s.offset_rad);
    r.number("frequency_hz", s.frequency_hz);
    r.number("amplitude_rad", s.amplitude_rad);
    v.waveform = s;
  } else {
    throw ConfigError(r.field("waveform") + " must be sinusoid or dc_plus_sinusoid");
  }
  r.finish();
  return v;
}

template <class F>
void checked(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  checked([&] {
    link.validate();
    det.validate();
    src.validate();
    sec.validate();
    if (!(protocol.slice_half_width > 0.0 && protocol.slice_half_width <= 1.5707963267948966))
      throw std::invalid_argument("protocol.slice_half_width must be in (0, pi/2]");
    if (keyrate) keyrate->validate();
    if (!(run.n_total > 0.0)) throw std::invalid_argument("run.n_total must be > 0");
    if (run.pulses == 0) throw std::invalid_argument("run.pulses must be > 0");
    parse_format(run.format);
    for (double d : curve.distances_km)
      if (!(d >= 0.0)) throw std::invalid_argument("curve.distances_km must be >= 0");
    if (!(optimize.around >= 0.0)) throw std::invalid_argument("optimize.around must be >= 0");

    sensing.geometry.validate();
    const auto& sim = sensing.simulation;
    if (!(sim.sample_rate_hz > 0.0)) throw std::invalid_argument("sensing.sample_rate_hz must be > 0");
    if (!(sim.duration_s > 0.0)) throw std::invalid_argument("sensing.duration_s must be > 0");
    if (!(sim.drift_rate >= 0.0)) throw std::invalid_argument("sensing.drift_rate must be >= 0");
    if (!(sim.noise_rad >= 0.0)) throw std::invalid_argument("sensing.noise_rad must be >= 0");
    if (!(sensing.photons_per_frame > 0.0))
      throw std::invalid_argument("sensing.photons_per_frame must be > 0");
    for (const auto& v : vibrations) {
      v.validate(sensing.geometry);
      if (sim.sample_rate_hz < 2.0 * v.frequency_hz())
        throw std::invalid_argument("vibration.frequency_hz aliases at sensing.sample_rate_hz");
      if (v.start_s + v.duration_s > sim.duration_s)
        throw std::invalid_argument("vibration extends past sensing.duration_s");
    }
  });
}

EvalSetup RunConfig::eval_setup() const {
  EvalSetup s;
  s.link = link;
  s.det = det;
  s.sec = sec;
  s.n_pulses = run.n_total;
  s.protocol = protocol;
  return s;
}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw ConfigError("key '" + name + "' must belong to a section");
    SectionReader r(section, name);
    if (name == "run") read_run(r, cfg.run);
    else if (name == "link") read_link(r, cfg.link);
    else if (name == "detector") read_detector(r, cfg.det);
    else if (name == "source") read_source(r, cfg.src);
    else if (name == "protocol") {
      r.number("slice_half_width", cfg.protocol.slice_half_width);
      r.finish();
    } else if (name == "security") read_security(r, cfg.sec);
    else if (name == "keyrate") cfg.keyrate = read_keyrate(r);
    else if (name == "curve") {
      r.list("distances_km", cfg.curve.distances_km);
      r.finish();
    } else if (name == "optimize") read_optimize(r, cfg.optimize);
    else if (name == "sensing") read_sensing(r, cfg.sensing);
    else if (name == "vibration" || name.rfind("vibration.", 0) == 0)
      cfg.vibrations.push_back(read_vibration(r));
    else throw ConfigError("unknown section [" + name + "]");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return parse_config(is);
}

}  // namespace snstf::cli
