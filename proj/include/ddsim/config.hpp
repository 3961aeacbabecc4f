#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddsim/errors.hpp"
#include "ddsim/sequence.hpp"
#include "ddsim/spectrum.hpp"

namespace ddsim {

// Run configuration, parsed from the INI-style grammar documented in the
// README: `[section]` headers, `key = value` lines, `#` comments. Unknown
// sections or keys are rejected; duplicate keys are parse errors. All
// physical quantities are in microseconds and rad/microsecond.
enum class SequenceFamily { udd, cpmg, three_pulse, custom, fid };
enum class FilterMode { single, repeated, fid };
enum class OrderSweepMode { fixed_power, fixed_cycle };

struct ModelConfig {
  SpectrumKind kind = SpectrumKind::gaussian;
  double tau_b = 110.0;
  double b_se = 0.01;
  std::optional<std::string> table;
  bool operator==(const ModelConfig&) const = default;
};

struct SequenceConfig {
  SequenceFamily family = SequenceFamily::udd;
  int order = 5;
  std::optional<double> cycle_time;
  std::optional<double> avg_spacing;
  double x = 0.0;
  std::vector<double> pulse_times;
  bool operator==(const SequenceConfig&) const = default;
};

struct FilterConfig {
  FilterMode mode = FilterMode::single;
  int cycles = 1;
  double duration = 100.0;
  double omega_min = 0.0;
  double omega_max = 0.5;
  int omega_count = 200;
  bool operator==(const FilterConfig&) const = default;
};

struct DecayConfig {
  std::vector<int> cycles;
  std::vector<double> times;
  bool operator==(const DecayConfig&) const = default;
};

struct McConfig {
  std::vector<int> cycles;
  bool operator==(const McConfig&) const = default;
};

struct SweepConfig {
  double x_min = -0.06, x_max = 0.06, x_step = 0.005;
  std::vector<double> cycle_times;
  OrderSweepMode mode = OrderSweepMode::fixed_power;
  int n_min = 3, n_max = 30;
  std::vector<int> orders;
  double eval_time = 6000.0;
  double avg_spacing = 110.4;
  double cycle_time = 600.0;
  double tau_c_min = 200.0, tau_c_max = 2000.0;
  int tau_c_count = 10;
  double spacing = 56.0;
  double tau_b_slow = 1000.0;
  std::vector<int> matched_orders;
  bool operator==(const SweepConfig&) const = default;
};

struct OptimizeConfig {
  double x_min = -0.06, x_max = 0.06;
  double cycle_time = 600.0;
  bool operator==(const OptimizeConfig&) const = default;
};

struct NumericsConfig {
  int k_max = 200;
  long trials = 20000;
  std::uint64_t seed = 0;
  int n_modes = 2048;
  double mc_dt_factor = 100.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_panels = 400000;
  int threads = 0;
  std::optional<double> fit_t_min;
  std::optional<double> fit_t_max;
  bool operator==(const NumericsConfig&) const = default;
};

struct OutputConfig {
  std::optional<std::string> path;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  SequenceConfig sequence;
  FilterConfig filter;
  DecayConfig decay;
  McConfig mc;
  SweepConfig sweep;
  OptimizeConfig optimize;
  NumericsConfig numerics;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct RawEntry {
  std::string value;
  int line;
};

struct RawConfig {
  // section -> key -> entry
  std::map<std::string, std::map<std::string, RawEntry>> sections;
};

inline RawConfig tokenize_config(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("unterminated section header", line_no,
                           static_cast<int>(t.size()));
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw config_error("empty section name", line_no, 1);
      raw.sections[section];  // sections may legitimately repeat (merged)
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("expected `key = value`", line_no, 1);
    if (section.empty())
      throw config_error("key outside of any [section]", line_no, 1);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw config_error("empty key", line_no, 1);
    auto& sec = raw.sections[section];
    if (sec.count(key))
      throw config_error("duplicate key `" + section + "." + key + "`", line_no, 1);
    sec[key] = {value, line_no};
  }
  return raw;
}

// Typed readers; a semantic error names the offending key.
inline double parse_double(const std::string& sec, const std::string& key, const RawEntry& e) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw config_error("key `" + sec + "." + key + "`: not a number", e.line, 1);
  }
  if (pos != e.value.size())
    throw config_error("key `" + sec + "." + key + "`: trailing characters", e.line, 1);
  return v;
}

inline long parse_long(const std::string& sec, const std::string& key, const RawEntry& e) {
  const double d = parse_double(sec, key, e);
  const long v = static_cast<long>(d);
  if (static_cast<double>(v) != d)
    throw config_error("key `" + sec + "." + key + "`: expected an integer", e.line, 1);
  return v;
}

inline std::vector<double> parse_double_list(const std::string& sec, const std::string& key,
                                             const RawEntry& e) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(sec, key, {tok, e.line}));
  return out;
}

inline std::vector<int> parse_int_list(const std::string& sec, const std::string& key,
                                       const RawEntry& e) {
  std::vector<int> out;
  for (double d : parse_double_list(sec, key, e)) {
    const int v = static_cast<int>(d);
    if (static_cast<double>(v) != d)
      throw config_error("key `" + sec + "." + key + "`: expected integers", e.line, 1);
    out.push_back(v);
  }
  return out;
}

class SectionReader {
public:
  SectionReader(const RawConfig& raw, std::string name) : name_(std::move(name)) {
    auto it = raw.sections.find(name_);
    if (it != raw.sections.end()) entries_ = &it->second;
  }

  bool has(const std::string& key) {
    if (!entries_) return false;
    const bool found = entries_->count(key) > 0;
    if (found) seen_.insert(key);
    return found;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? parse_double(name_, key, entries_->at(key)) : fallback;
  }
  long integer(const std::string& key, long fallback) {
    return has(key) ? parse_long(name_, key, entries_->at(key)) : fallback;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? entries_->at(key).value : fallback;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    return has(key) ? parse_double_list(name_, key, entries_->at(key)) : std::move(fallback);
  }
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    return has(key) ? parse_int_list(name_, key, entries_->at(key)) : std::move(fallback);
  }
  int line_of(const std::string& key) const {
    return entries_ && entries_->count(key) ? entries_->at(key).line : 0;
  }

  void reject_unknown() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_)
      if (!seen_.count(key))
        throw config_error("unknown key `" + name_ + "." + key + "`", entry.line, 1);
  }

private:
  std::string name_;
  const std::map<std::string, RawEntry>* entries_ = nullptr;
  std::set<std::string> seen_;
};

inline void semantic_error(const std::string& key, const std::string& what, int line = 0) {
  throw config_error("key `" + key + "`: " + what, line, 0);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  const RawConfig raw = tokenize_config(text);
  static const std::set<std::string> known_sections = {
      "model", "sequence", "filter", "decay", "mc", "sweep", "optimize", "numerics", "output"};
  for (const auto& [name, entries] : raw.sections) {
    if (!known_sections.count(name)) {
      const int line = entries.empty() ? 0 : entries.begin()->second.line;
      throw config_error("unknown section `[" + name + "]`", line, 1);
    }
  }

  RunConfig cfg;

  SectionReader model(raw, "model");
  const std::string kind = model.text("kind", "gaussian");
  if (kind == "gaussian") cfg.model.kind = SpectrumKind::gaussian;
  else if (kind == "lorentzian") cfg.model.kind = SpectrumKind::lorentzian;
  else if (kind == "tabulated") cfg.model.kind = SpectrumKind::tabulated;
  else semantic_error("model.kind", "must be gaussian|lorentzian|tabulated", model.line_of("kind"));
  cfg.model.tau_b = model.number("tau_b", cfg.model.tau_b);
  if (!(cfg.model.tau_b > 0.0))
    semantic_error("model.tau_b", "must be > 0", model.line_of("tau_b"));
  cfg.model.b_se = model.number("b_se", cfg.model.b_se);
  if (!(cfg.model.b_se >= 0.0))
    semantic_error("model.b_se", "must be >= 0", model.line_of("b_se"));
  if (model.has("table")) cfg.model.table = model.text("table", "");
  if (cfg.model.kind == SpectrumKind::tabulated && !cfg.model.table)
    semantic_error("model.table", "required for tabulated spectra");
  model.reject_unknown();

  SectionReader seq(raw, "sequence");
  const std::string family = seq.text("family", "udd");
  if (family == "udd") cfg.sequence.family = SequenceFamily::udd;
  else if (family == "cpmg") cfg.sequence.family = SequenceFamily::cpmg;
  else if (family == "three_pulse") cfg.sequence.family = SequenceFamily::three_pulse;
  else if (family == "custom") cfg.sequence.family = SequenceFamily::custom;
  else if (family == "fid") cfg.sequence.family = SequenceFamily::fid;
  else semantic_error("sequence.family", "must be udd|cpmg|three_pulse|custom|fid",
                      seq.line_of("family"));
  cfg.sequence.order = static_cast<int>(seq.integer("order", cfg.sequence.order));
  if (seq.has("cycle_time")) cfg.sequence.cycle_time = seq.number("cycle_time", 0.0);
  if (seq.has("avg_spacing")) cfg.sequence.avg_spacing = seq.number("avg_spacing", 0.0);
  cfg.sequence.x = seq.number("x", cfg.sequence.x);
  cfg.sequence.pulse_times = seq.numbers("pulse_times", {});
  if (cfg.sequence.cycle_time && !(*cfg.sequence.cycle_time > 0.0))
    semantic_error("sequence.cycle_time", "must be > 0", seq.line_of("cycle_time"));
  if (cfg.sequence.avg_spacing && !(*cfg.sequence.avg_spacing > 0.0))
    semantic_error("sequence.avg_spacing", "must be > 0", seq.line_of("avg_spacing"));
  seq.reject_unknown();

  SectionReader filter(raw, "filter");
  const std::string mode = filter.text("mode", "single");
  if (mode == "single") cfg.filter.mode = FilterMode::single;
  else if (mode == "repeated") cfg.filter.mode = FilterMode::repeated;
  else if (mode == "fid") cfg.filter.mode = FilterMode::fid;
  else semantic_error("filter.mode", "must be single|repeated|fid", filter.line_of("mode"));
  cfg.filter.cycles = static_cast<int>(filter.integer("cycles", cfg.filter.cycles));
  cfg.filter.duration = filter.number("duration", cfg.filter.duration);
  cfg.filter.omega_min = filter.number("omega_min", cfg.filter.omega_min);
  cfg.filter.omega_max = filter.number("omega_max", cfg.filter.omega_max);
  cfg.filter.omega_count = static_cast<int>(filter.integer("omega_count", cfg.filter.omega_count));
  if (cfg.filter.cycles < 1) semantic_error("filter.cycles", "must be >= 1", filter.line_of("cycles"));
  if (cfg.filter.omega_count < 2)
    semantic_error("filter.omega_count", "must be >= 2", filter.line_of("omega_count"));
  if (!(cfg.filter.omega_max > cfg.filter.omega_min))
    semantic_error("filter.omega_max", "must exceed omega_min", filter.line_of("omega_max"));
  filter.reject_unknown();

  SectionReader decay(raw, "decay");
  cfg.decay.cycles = decay.integers("cycles", {});
  cfg.decay.times = decay.numbers("times", {});
  decay.reject_unknown();

  SectionReader mc(raw, "mc");
  cfg.mc.cycles = mc.integers("cycles", {});
  mc.reject_unknown();

  SectionReader sweep(raw, "sweep");
  cfg.sweep.x_min = sweep.number("x_min", cfg.sweep.x_min);
  cfg.sweep.x_max = sweep.number("x_max", cfg.sweep.x_max);
  cfg.sweep.x_step = sweep.number("x_step", cfg.sweep.x_step);
  cfg.sweep.cycle_times = sweep.numbers("cycle_times", {400.0, 600.0, 900.0});
  const std::string smode = sweep.text("mode", "fixed_power");
  if (smode == "fixed_power") cfg.sweep.mode = OrderSweepMode::fixed_power;
  else if (smode == "fixed_cycle") cfg.sweep.mode = OrderSweepMode::fixed_cycle;
  else semantic_error("sweep.mode", "must be fixed_power|fixed_cycle", sweep.line_of("mode"));
  cfg.sweep.n_min = static_cast<int>(sweep.integer("n_min", cfg.sweep.n_min));
  cfg.sweep.n_max = static_cast<int>(sweep.integer("n_max", cfg.sweep.n_max));
  cfg.sweep.orders = sweep.integers("orders", {2, 6, 10, 14});
  cfg.sweep.eval_time = sweep.number("eval_time", cfg.sweep.eval_time);
  cfg.sweep.avg_spacing = sweep.number("avg_spacing", cfg.sweep.avg_spacing);
  cfg.sweep.cycle_time = sweep.number("cycle_time", cfg.sweep.cycle_time);
  cfg.sweep.tau_c_min = sweep.number("tau_c_min", cfg.sweep.tau_c_min);
  cfg.sweep.tau_c_max = sweep.number("tau_c_max", cfg.sweep.tau_c_max);
  cfg.sweep.tau_c_count = static_cast<int>(sweep.integer("tau_c_count", cfg.sweep.tau_c_count));
  cfg.sweep.spacing = sweep.number("spacing", cfg.sweep.spacing);
  cfg.sweep.tau_b_slow = sweep.number("tau_b_slow", cfg.sweep.tau_b_slow);
  cfg.sweep.matched_orders = sweep.integers("matched_orders", {12});
  if (!(cfg.sweep.tau_b_slow > 0.0))
    semantic_error("sweep.tau_b_slow", "must be > 0", sweep.line_of("tau_b_slow"));
  sweep.reject_unknown();

  SectionReader opt(raw, "optimize");
  cfg.optimize.x_min = opt.number("x_min", cfg.optimize.x_min);
  cfg.optimize.x_max = opt.number("x_max", cfg.optimize.x_max);
  cfg.optimize.cycle_time = opt.number("cycle_time", cfg.optimize.cycle_time);
  if (!(cfg.optimize.cycle_time > 0.0))
    semantic_error("optimize.cycle_time", "must be > 0", opt.line_of("cycle_time"));
  opt.reject_unknown();

  SectionReader num(raw, "numerics");
  cfg.numerics.k_max = static_cast<int>(num.integer("k_max", cfg.numerics.k_max));
  cfg.numerics.trials = num.integer("trials", cfg.numerics.trials);
  cfg.numerics.seed = static_cast<std::uint64_t>(num.integer("seed", 0));
  cfg.numerics.n_modes = static_cast<int>(num.integer("n_modes", cfg.numerics.n_modes));
  cfg.numerics.mc_dt_factor = num.number("mc_dt_factor", cfg.numerics.mc_dt_factor);
  cfg.numerics.abs_tol = num.number("abs_tol", cfg.numerics.abs_tol);
  cfg.numerics.rel_tol = num.number("rel_tol", cfg.numerics.rel_tol);
  cfg.numerics.max_panels = static_cast<int>(num.integer("max_panels", cfg.numerics.max_panels));
  cfg.numerics.threads = static_cast<int>(num.integer("threads", cfg.numerics.threads));
  if (num.has("fit_t_min")) cfg.numerics.fit_t_min = num.number("fit_t_min", 0.0);
  if (num.has("fit_t_max")) cfg.numerics.fit_t_max = num.number("fit_t_max", 0.0);
  if (cfg.numerics.k_max < 1) semantic_error("numerics.k_max", "must be >= 1", num.line_of("k_max"));
  if (!(cfg.numerics.abs_tol > 0.0) || !(cfg.numerics.rel_tol > 0.0))
    semantic_error("numerics.abs_tol", "tolerances must be > 0", num.line_of("abs_tol"));
  num.reject_unknown();

  SectionReader out(raw, "output");
  if (out.has("path")) cfg.output.path = out.text("path", "");
  out.reject_unknown();

  return cfg;
}

namespace detail {

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Canonical text form; parse(print_config(cfg)) == cfg bit-exactly.
inline std::string print_config(const RunConfig& cfg) {
  using detail::fmt_full;
  std::ostringstream o;
  o << "[model]\n";
  o << "kind = " << to_string(cfg.model.kind) << "\n";
  o << "tau_b = " << fmt_full(cfg.model.tau_b) << "\n";
  o << "b_se = " << fmt_full(cfg.model.b_se) << "\n";
  if (cfg.model.table) o << "table = " << *cfg.model.table << "\n";

  o << "\n[sequence]\n";
  const char* fam = "udd";
  switch (cfg.sequence.family) {
    case SequenceFamily::udd: fam = "udd"; break;
    case SequenceFamily::cpmg: fam = "cpmg"; break;
    case SequenceFamily::three_pulse: fam = "three_pulse"; break;
    case SequenceFamily::custom: fam = "custom"; break;
    case SequenceFamily::fid: fam = "fid"; break;
  }
  o << "family = " << fam << "\n";
  o << "order = " << cfg.sequence.order << "\n";
  if (cfg.sequence.cycle_time) o << "cycle_time = " << fmt_full(*cfg.sequence.cycle_time) << "\n";
  if (cfg.sequence.avg_spacing) o << "avg_spacing = " << fmt_full(*cfg.sequence.avg_spacing) << "\n";
  o << "x = " << fmt_full(cfg.sequence.x) << "\n";
  if (!cfg.sequence.pulse_times.empty()) {
    o << "pulse_times =";
    for (double t : cfg.sequence.pulse_times) o << " " << fmt_full(t);
    o << "\n";
  }

  o << "\n[filter]\n";
  o << "mode = "
    << (cfg.filter.mode == FilterMode::single
            ? "single"
            : (cfg.filter.mode == FilterMode::repeated ? "repeated" : "fid"))
    << "\n";
  o << "cycles = " << cfg.filter.cycles << "\n";
  o << "duration = " << fmt_full(cfg.filter.duration) << "\n";
  o << "omega_min = " << fmt_full(cfg.filter.omega_min) << "\n";
  o << "omega_max = " << fmt_full(cfg.filter.omega_max) << "\n";
  o << "omega_count = " << cfg.filter.omega_count << "\n";

  if (!cfg.decay.cycles.empty() || !cfg.decay.times.empty()) {
    o << "\n[decay]\n";
    if (!cfg.decay.cycles.empty()) {
      o << "cycles =";
      for (int m : cfg.decay.cycles) o << " " << m;
      o << "\n";
    }
    if (!cfg.decay.times.empty()) {
      o << "times =";
      for (double t : cfg.decay.times) o << " " << fmt_full(t);
      o << "\n";
    }
  }

  if (!cfg.mc.cycles.empty()) {
    o << "\n[mc]\n";
    o << "cycles =";
    for (int m : cfg.mc.cycles) o << " " << m;
    o << "\n";
  }

  o << "\n[sweep]\n";
  o << "x_min = " << fmt_full(cfg.sweep.x_min) << "\n";
  o << "x_max = " << fmt_full(cfg.sweep.x_max) << "\n";
  o << "x_step = " << fmt_full(cfg.sweep.x_step) << "\n";
  o << "cycle_times =";
  for (double t : cfg.sweep.cycle_times) o << " " << fmt_full(t);
  o << "\n";
  o << "mode = " << (cfg.sweep.mode == OrderSweepMode::fixed_power ? "fixed_power" : "fixed_cycle")
    << "\n";
  o << "n_min = " << cfg.sweep.n_min << "\n";
  o << "n_max = " << cfg.sweep.n_max << "\n";
  o << "orders =";
  for (int n : cfg.sweep.orders) o << " " << n;
  o << "\n";
  o << "eval_time = " << fmt_full(cfg.sweep.eval_time) << "\n";
  o << "avg_spacing = " << fmt_full(cfg.sweep.avg_spacing) << "\n";
  o << "cycle_time = " << fmt_full(cfg.sweep.cycle_time) << "\n";
  o << "tau_c_min = " << fmt_full(cfg.sweep.tau_c_min) << "\n";
  o << "tau_c_max = " << fmt_full(cfg.sweep.tau_c_max) << "\n";
  o << "tau_c_count = " << cfg.sweep.tau_c_count << "\n";
  o << "spacing = " << fmt_full(cfg.sweep.spacing) << "\n";
  o << "tau_b_slow = " << fmt_full(cfg.sweep.tau_b_slow) << "\n";
  o << "matched_orders =";
  for (int n : cfg.sweep.matched_orders) o << " " << n;
  o << "\n";

  o << "\n[optimize]\n";
  o << "x_min = " << fmt_full(cfg.optimize.x_min) << "\n";
  o << "x_max = " << fmt_full(cfg.optimize.x_max) << "\n";
  o << "cycle_time = " << fmt_full(cfg.optimize.cycle_time) << "\n";

  o << "\n[numerics]\n";
  o << "k_max = " << cfg.numerics.k_max << "\n";
  o << "trials = " << cfg.numerics.trials << "\n";
  o << "seed = " << cfg.numerics.seed << "\n";
  o << "n_modes = " << cfg.numerics.n_modes << "\n";
  o << "mc_dt_factor = " << fmt_full(cfg.numerics.mc_dt_factor) << "\n";
  o << "abs_tol = " << fmt_full(cfg.numerics.abs_tol) << "\n";
  o << "rel_tol = " << fmt_full(cfg.numerics.rel_tol) << "\n";
  o << "max_panels = " << cfg.numerics.max_panels << "\n";
  o << "threads = " << cfg.numerics.threads << "\n";
  if (cfg.numerics.fit_t_min) o << "fit_t_min = " << fmt_full(*cfg.numerics.fit_t_min) << "\n";
  if (cfg.numerics.fit_t_max) o << "fit_t_max = " << fmt_full(*cfg.numerics.fit_t_max) << "\n";

  if (cfg.output.path) {
    o << "\n[output]\n";
    o << "path = " << *cfg.output.path << "\n";
  }
  return o.str();
}

// Serializable sequence block (External Interfaces): family, order,
// cycle time, and the explicit pulse list for custom sequences.
inline std::string print_sequence_block(const PulseSequence& seq) {
  std::ostringstream o;
  o << "[sequence]\n";
  std::string fam = "custom";
  if (seq.label == "UDD") fam = "udd";
  else if (seq.label == "CPMG") fam = "cpmg";
  else if (seq.label == "FID") fam = "fid";
  o << "family = " << fam << "\n";
  o << "order = " << seq.order << "\n";
  o << "cycle_time = " << detail::fmt_full(seq.cycle_time) << "\n";
  o << "x = 0\n";
  if (fam == "custom") {
    o << "pulse_times =";
    for (double t : seq.pulse_times) o << " " << detail::fmt_full(t);
    o << "\n";
  }
  return o.str();
}

// Materialize the sequence described by the configuration.
inline PulseSequence make_sequence(const SequenceConfig& sc) {
  auto cycle_for = [&](int pulses_per_cycle) {
    if (sc.cycle_time) return *sc.cycle_time;
    if (sc.avg_spacing) return *sc.avg_spacing * pulses_per_cycle;
    throw config_error("sequence: need cycle_time or avg_spacing");
  };
  switch (sc.family) {
    case SequenceFamily::udd:
      return udd_times(sc.order, cycle_for(sc.order));
    case SequenceFamily::cpmg:
      return cpmg_times(sc.order, cycle_for(sc.order));
    case SequenceFamily::three_pulse:
      return three_pulse_family(sc.x, cycle_for(3));
    case SequenceFamily::custom: {
      if (!sc.cycle_time) throw config_error("sequence: custom requires cycle_time");
      return custom_sequence(sc.pulse_times, *sc.cycle_time);
    }
    case SequenceFamily::fid:
      return free_evolution(cycle_for(1));
  }
  throw config_error("sequence: unknown family");
}

inline PulseSequence parse_sequence_block(const std::string& text) {
  const RunConfig cfg = parse_config(text);
  return make_sequence(cfg.sequence);
}

}  // namespace ddsim
