#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddsim/config.hpp"
#include "ddsim/csv.hpp"
#include "ddsim/decay.hpp"
#include "ddsim/experiments.hpp"
#include "ddsim/filterfn.hpp"
#include "ddsim/stochastic.hpp"
#include "ddsim/version.hpp"

namespace ddsim::cli {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline NoiseModel make_model(const ModelConfig& mc) {
  switch (mc.kind) {
    case SpectrumKind::gaussian: return gaussian_model(mc.tau_b, mc.b_se);
    case SpectrumKind::lorentzian: return lorentzian_model(mc.tau_b, mc.b_se);
    case SpectrumKind::tabulated: {
      std::vector<double> w, s;
      read_two_column_csv(*mc.table, w, s);
      return tabulated_model(w, s, mc.b_se);
    }
  }
  throw config_error("model: unknown kind");
}

inline RunConfig load_config(const GlobalFlags& flags) {
  RunConfig cfg = parse_config(read_file(flags.config_path));
  if (flags.out) cfg.output.path = *flags.out;
  if (flags.seed) cfg.numerics.seed = *flags.seed;
  if (flags.threads) cfg.numerics.threads = *flags.threads;
  return cfg;
}

inline NumericOptions numeric_options(const RunConfig& cfg) {
  NumericOptions o;
  o.abs_tol = cfg.numerics.abs_tol;
  o.rel_tol = cfg.numerics.rel_tol;
  o.k_max = cfg.numerics.k_max;
  o.max_panels = cfg.numerics.max_panels;
  return o;
}

inline SweepOptions sweep_options(const RunConfig& cfg, const NoiseModel& model) {
  SweepOptions o;
  o.numerics = numeric_options(cfg);
  o.threads = cfg.numerics.threads;
  FitWindow w = default_fit_window(model);
  if (cfg.numerics.fit_t_min) w.t_min = *cfg.numerics.fit_t_min;
  if (cfg.numerics.fit_t_max) w.t_max = *cfg.numerics.fit_t_max;
  o.fit_window = w;
  return o;
}

// Writes CSV to the configured path (or stdout) and, when a path is set, a
// sibling `<path>.manifest` echoing everything needed to re-run bit-identically.
class OutputSink {
public:
  OutputSink(const RunConfig& cfg, const std::string& command)
      : cfg_(cfg), command_(command), start_(std::chrono::steady_clock::now()) {
    if (cfg.output.path) writer_.emplace(*cfg.output.path);
    else writer_.emplace(std::cout);
  }

  CsvWriter& csv() { return *writer_; }

  void finish() {
    writer_->close();
    if (!cfg_.output.path) return;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream m(*cfg_.output.path + ".manifest");
    if (!m) throw io_error("cannot write manifest next to `" + *cfg_.output.path + "`");
    m << "# ddsim " << version_string << " run manifest\n";
    m << "command = " << command_ << "\n";
    m << "seed = " << cfg_.numerics.seed << "\n";
    m << "threads = " << cfg_.numerics.threads << "\n";
    m << "wall_time_s = " << wall << "\n";
    m << "\n# full configuration echo\n";
    m << print_config(cfg_);
  }

private:
  RunConfig cfg_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::optional<CsvWriter> writer_;
};

inline int run_filter(const RunConfig& cfg) {
  OutputSink sink(cfg, "filter");
  auto& w = sink.csv();
  w.header({"omega", "re_f", "im_f", "abs2"});
  const int n = cfg.filter.omega_count;
  auto emit = [&](auto&& f) {
    for (int i = 0; i < n; ++i) {
      const double omega =
          cfg.filter.omega_min + (cfg.filter.omega_max - cfg.filter.omega_min) * i / (n - 1);
      const std::complex<double> v = f(omega);
      w.row({omega, v.real(), v.imag(), std::norm(v)});
    }
  };
  if (cfg.filter.mode == FilterMode::fid) {
    emit([&](double omega) { return filter_fid(omega, cfg.filter.duration); });
  } else {
    const ToggleFilter tf = toggle_filter(make_sequence(cfg.sequence));
    if (cfg.filter.mode == FilterMode::single)
      emit([&](double omega) { return filter_single(tf, omega); });
    else
      emit([&](double omega) { return filter_repeated(tf, cfg.filter.cycles, omega); });
  }
  sink.finish();
  return 0;
}

inline int run_decay(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  const NumericOptions opts = numeric_options(cfg);
  DecayCurve curve;
  if (cfg.sequence.family == SequenceFamily::fid) {
    std::vector<double> times = cfg.decay.times;
    if (times.empty())
      for (int i = 1; i <= 10; ++i) times.push_back(i * model.correlation_time());
    curve = decay_curve_fid(times, model, opts);
  } else {
    std::vector<int> cycles = cfg.decay.cycles;
    if (cycles.empty())
      for (int m = 1; m <= 10; ++m) cycles.push_back(m);
    curve = decay_curve_dd(make_sequence(cfg.sequence), cycles, model, opts);
  }
  OutputSink sink(cfg, "decay");
  emit_decay_csv(sink.csv(), curve);
  sink.finish();
  return 0;
}

inline int run_rate(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  const SweepOptions opts = sweep_options(cfg, model);
  const PulseSequence seq = make_sequence(cfg.sequence);
  const auto r = dd_rate(seq, model, *opts.fit_window, opts.numerics);
  OutputSink sink(cfg, "rate");
  auto& w = sink.csv();
  w.comment("sequence: " + seq.label + " order=" + std::to_string(seq.order));
  w.comment("fit_window: [" + std::to_string(r.fit.t_min) + ", " + std::to_string(r.fit.t_max) +
            "] n_points=" + std::to_string(r.fit.n_points));
  w.header({"parameter", "rate", "max_residual"});
  w.row({static_cast<double>(seq.order), r.fit.rate, r.fit.max_residual});
  sink.finish();
  return 0;
}

inline int run_mc(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  std::vector<int> cycles = cfg.mc.cycles;
  if (cycles.empty()) cycles = {1, 2, 3, 4, 5};
  McOptions mo;
  mo.n_modes = cfg.numerics.n_modes;
  mo.dt_factor = cfg.numerics.mc_dt_factor;
  mo.threads = cfg.numerics.threads;
  const McResult mc = mc_survival(make_sequence(cfg.sequence), cycles, model,
                                  cfg.numerics.trials, cfg.numerics.seed, mo);
  OutputSink sink(cfg, "mc");
  emit_mc_csv(sink.csv(), mc);
  sink.finish();
  return 0;
}

inline int run_sweep_x(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  std::vector<double> xs;
  for (double x = cfg.sweep.x_min; x <= cfg.sweep.x_max + 1e-12; x += cfg.sweep.x_step)
    xs.push_back(x);
  const auto results = sweep_x(xs, cfg.sweep.cycle_times, model, sweep_options(cfg, model));
  OutputSink sink(cfg, "sweep-x");
  emit_sweep_csv(sink.csv(), results);
  sink.finish();
  return 0;
}

inline int run_sweep_order(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  std::vector<SweepResult> results;
  if (cfg.sweep.mode == OrderSweepMode::fixed_power) {
    results = sweep_order_fixed_power(cfg.sweep.n_min, cfg.sweep.n_max, cfg.sweep.avg_spacing,
                                      model, sweep_options(cfg, model));
  } else {
    results = sweep_order_fixed_cycle(cfg.sweep.orders, cfg.sweep.cycle_time,
                                      cfg.sweep.eval_time, model, sweep_options(cfg, model));
  }
  OutputSink sink(cfg, "sweep-order");
  emit_sweep_csv(sink.csv(), results);
  sink.finish();
  return 0;
}

inline int run_sweep_cycle(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  std::vector<double> taus;
  for (int i = 0; i < cfg.sweep.tau_c_count; ++i)
    taus.push_back(cfg.sweep.tau_c_min + (cfg.sweep.tau_c_max - cfg.sweep.tau_c_min) * i /
                                             std::max(1, cfg.sweep.tau_c_count - 1));
  const auto results =
      sweep_cycle_time(cfg.sequence.order, taus, model, sweep_options(cfg, model));
  OutputSink sink(cfg, "sweep-cycle");
  emit_sweep_csv(sink.csv(), results);
  sink.finish();
  return 0;
}

inline int run_slow_bath(const RunConfig& cfg) {
  const NoiseModel fast = make_model(cfg.model);
  ModelConfig slow_cfg = cfg.model;
  slow_cfg.tau_b = cfg.sweep.tau_b_slow;
  const NoiseModel slow = make_model(slow_cfg);

  std::vector<LabeledSequence> seqs;
  const double s = cfg.sweep.spacing;
  seqs.push_back({"CPMG", cpmg_times(2, 2.0 * s)});
  for (int n : cfg.sweep.orders)
    if (n >= 1) seqs.push_back({"UDD" + std::to_string(n), udd_times(n, n * s)});
  for (int n : cfg.sweep.matched_orders)
    seqs.push_back({"CPMG" + std::to_string(n), cpmg_times(n, n * s)});

  // Both baths are probed over the same experimental time span (the fast
  // bath's default window unless overridden).
  SweepOptions opts = sweep_options(cfg, fast);
  auto results = slow_bath_comparison(seqs, fast, slow, opts);
  OutputSink sink(cfg, "slow-bath");
  auto& w = sink.csv();
  for (std::size_t i = 0; i < seqs.size(); ++i)
    w.comment("sequence " + std::to_string(i) + ": " + seqs[i].label);
  emit_sweep_csv(w, results);
  sink.finish();
  return 0;
}

inline int run_optimize(const RunConfig& cfg) {
  const NoiseModel model = make_model(cfg.model);
  const double tau_c = cfg.optimize.cycle_time;
  const auto r = minimize_rate(
      [tau_c](double x) { return three_pulse_family(x, tau_c); }, cfg.optimize.x_min,
      cfg.optimize.x_max, model, sweep_options(cfg, model));
  OutputSink sink(cfg, "optimize");
  auto& w = sink.csv();
  const char* flag = r.flag == MinimizeFlag::ok
                         ? "ok"
                         : (r.flag == MinimizeFlag::boundary ? "boundary" : "flat");
  w.comment(std::string("flag: ") + flag);
  w.header({"parameter", "rate", "max_residual"});
  w.row({r.parameter, r.rate, 0.0});
  sink.finish();
  return 0;
}

inline int cli_run(int argc, const char* const* argv) {
  CLI::App app{"ddsim: qubit dephasing under dynamical-decoupling pulse sequences"};
  app.require_subcommand(1);

  GlobalFlags flags;
  const std::vector<std::pair<std::string, int (*)(const RunConfig&)>> commands = {
      {"filter", run_filter},       {"decay", run_decay},
      {"rate", run_rate},           {"mc", run_mc},
      {"sweep-x", run_sweep_x},     {"sweep-order", run_sweep_order},
      {"sweep-cycle", run_sweep_cycle}, {"slow-bath", run_slow_bath},
      {"optimize", run_optimize}};

  int (*selected)(const RunConfig&) = nullptr;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config_path, "configuration file")->required();
    sub->add_option("--out", [&flags](const std::vector<std::string>& v) {
      flags.out = v.front();
      return true;
    }, "output CSV path (default: stdout)");
    sub->add_option("--seed", [&flags](const std::vector<std::string>& v) {
      flags.seed = std::stoull(v.front());
      return true;
    }, "override numerics.seed");
    sub->add_option("--threads", [&flags](const std::vector<std::string>& v) {
      flags.threads = std::stoi(v.front());
      return true;
    }, "override numerics.threads");
    auto fn_copy = fn;
    sub->callback([&selected, fn_copy] { selected = fn_copy; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const RunConfig cfg = load_config(flags);
    return selected(cfg);
  } catch (const config_error& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace ddsim::cli
