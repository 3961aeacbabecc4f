#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ddsim/decay.hpp"
#include "ddsim/sequence.hpp"
#include "ddsim/spectrum.hpp"

namespace ddsim {

struct QuadraticMinimum {
  double location = 0.0;
  double value = 0.0;
  double max_residual = 0.0;
};

struct SweepResult {
  std::string series;     // e.g. "tau_c=600", "UDD", "CPMG"
  std::string parameter;  // swept quantity name
  std::string metric = "rate";
  std::vector<double> values;
  std::vector<double> results;
  std::vector<double> max_residuals;  // per-point fit residuals (0 if N/A)
  std::optional<QuadraticMinimum> minimum;
};

enum class MinimizeFlag { ok, boundary, flat };

struct MinimizeResult {
  double parameter = 0.0;
  double rate = 0.0;
  MinimizeFlag flag = MinimizeFlag::ok;
};

namespace detail {

template <class Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1, 64);
  if (n_threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (int w = 0; w < n_threads; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo < hi)
      workers.emplace_back([lo, hi, &fn] {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      });
  }
  for (auto& th : workers) th.join();
}

// Least-squares parabola through the n_local points nearest the grid minimum;
// reports the vertex when the curvature is positive and the vertex lies inside
// the scanned interval.
inline std::optional<QuadraticMinimum> quadratic_minimum(const std::vector<double>& xs,
                                                         const std::vector<double>& ys,
                                                         int n_local = 7) {
  const std::size_t n = xs.size();
  if (n < 3) return std::nullopt;
  std::size_t i_min = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (ys[i] < ys[i_min]) i_min = i;
  const std::size_t half = static_cast<std::size_t>(n_local) / 2;
  std::size_t lo = i_min > half ? i_min - half : 0;
  std::size_t hi = std::min(n, lo + static_cast<std::size_t>(n_local));
  lo = hi >= static_cast<std::size_t>(n_local) ? hi - static_cast<std::size_t>(n_local) : 0;

  // Normal equations for y = a + b x + c x^2, centered for conditioning.
  const double x0 = xs[i_min];
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = xs[i] - x0;
    const double u2 = u * u;
    s0 += 1;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    t0 += ys[i];
    t1 += ys[i] * u;
    t2 += ys[i] * u2;
  }
  const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                     s2 * (s1 * s3 - s2 * s2);
  if (det == 0.0) return std::nullopt;
  const double a = (t0 * (s2 * s4 - s3 * s3) - s1 * (t1 * s4 - s3 * t2) +
                    s2 * (t1 * s3 - s2 * t2)) /
                   det;
  const double b = (s0 * (t1 * s4 - t2 * s3) - t0 * (s1 * s4 - s3 * s2) +
                    s2 * (s1 * t2 - s2 * t1)) /
                   det;
  const double c = (s0 * (s2 * t2 - s3 * t1) - s1 * (s1 * t2 - s3 * t0) +
                    t0 * (s1 * s3 - s2 * s2)) /
                   det;
  if (!(c > 0.0)) return std::nullopt;
  QuadraticMinimum qm;
  qm.location = x0 - 0.5 * b / c;
  qm.value = a - 0.25 * b * b / c;
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = xs[i] - x0;
    qm.max_residual = std::max(qm.max_residual,
                               std::abs(ys[i] - (a + b * u + c * u * u)));
  }
  if (qm.location < xs.front() || qm.location > xs.back()) return std::nullopt;
  return qm;
}

}  // namespace detail

struct SweepOptions {
  NumericOptions numerics;
  std::optional<FitWindow> fit_window;  // default: [5 tau_B, 50 tau_B] per model
  int threads = 0;
};

inline FitWindow resolve_window(const SweepOptions& opts, const NoiseModel& model) {
  return opts.fit_window ? *opts.fit_window : default_fit_window(model);
}

// Decay rate of the mirror-symmetric three-pulse family versus the deviation
// x, one series per cycle time; each series carries the quadratic-fit minimum.
inline std::vector<SweepResult> sweep_x(const std::vector<double>& x_values,
                                        const std::vector<double>& cycle_times,
                                        const NoiseModel& model,
                                        const SweepOptions& opts = {}) {
  const FitWindow window = resolve_window(opts, model);
  std::vector<SweepResult> out;
  for (double tau_c : cycle_times) {
    SweepResult r;
    r.series = "tau_c=" + std::to_string(tau_c);
    r.parameter = "x";
    r.values = x_values;
    r.results.assign(x_values.size(), 0.0);
    r.max_residuals.assign(x_values.size(), 0.0);
    detail::parallel_for_index(x_values.size(), opts.threads, [&](std::size_t i) {
      const auto rr = dd_rate(three_pulse_family(x_values[i], tau_c), model, window,
                              opts.numerics);
      r.results[i] = rr.fit.rate;
      r.max_residuals[i] = rr.fit.max_residual;
    });
    r.minimum = detail::quadratic_minimum(r.values, r.results);
    out.push_back(std::move(r));
  }
  return out;
}

// Fixed control power: cycle time scales with the order, tau_c = N * tau_avg,
// so the pulse count per unit time stays constant. The CPMG reference is the
// two-pulse cycle with the same average spacing.
inline std::vector<SweepResult> sweep_order_fixed_power(int n_lo, int n_hi, double tau_avg,
                                                        const NoiseModel& model,
                                                        const SweepOptions& opts = {}) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("sweep_order_fixed_power: bad order range");
  const FitWindow window = resolve_window(opts, model);
  SweepResult udd;
  udd.series = "UDD";
  udd.parameter = "N";
  for (int n = n_lo; n <= n_hi; ++n) udd.values.push_back(n);
  udd.results.assign(udd.values.size(), 0.0);
  udd.max_residuals.assign(udd.values.size(), 0.0);
  detail::parallel_for_index(udd.values.size(), opts.threads, [&](std::size_t i) {
    const int n = static_cast<int>(udd.values[i]);
    const auto rr = dd_rate(udd_times(n, n * tau_avg), model, window, opts.numerics);
    udd.results[i] = rr.fit.rate;
    udd.max_residuals[i] = rr.fit.max_residual;
  });

  SweepResult cpmg;
  cpmg.series = "CPMG";
  cpmg.parameter = "N";
  cpmg.values = {2.0};
  const auto rr = dd_rate(cpmg_times(2, 2.0 * tau_avg), model, window, opts.numerics);
  cpmg.results = {rr.fit.rate};
  cpmg.max_residuals = {rr.fit.max_residual};
  return {std::move(udd), std::move(cpmg)};
}

// Fixed cycle time: survival probability at a common evaluation time versus
// order. Order 0 is the free-evolution baseline. eval_time must sit on the
// stroboscopic grid of every order (it is checked per sequence).
inline std::vector<SweepResult> sweep_order_fixed_cycle(const std::vector<int>& orders,
                                                        double tau_c, double eval_time,
                                                        const NoiseModel& model,
                                                        const SweepOptions& opts = {}) {
  SweepResult r;
  r.series = "tau_c=" + std::to_string(tau_c);
  r.parameter = "N";
  r.metric = "survival";
  for (int n : orders) r.values.push_back(n);
  r.results.assign(orders.size(), 0.0);
  r.max_residuals.assign(orders.size(), 0.0);
  detail::parallel_for_index(orders.size(), opts.threads, [&](std::size_t i) {
    const int n = orders[i];
    double chi;
    if (n == 0) {
      chi = chi_fid(eval_time, model, opts.numerics);
    } else {
      const PulseSequence seq = udd_times(n, tau_c);
      const double period = toggle_filter(seq).period;
      const int m = static_cast<int>(std::llround(eval_time / period));
      if (m < 1 || std::abs(m * period - eval_time) > 1e-6 * eval_time)
        throw std::invalid_argument("sweep_order_fixed_cycle: eval_time is not a multiple of the filter period");
      chi = chi_dd(seq, m, model, opts.numerics);
    }
    r.results[i] = std::exp(-chi);
  });
  return {std::move(r)};
}

// Rates versus cycle time for UDD_N against the pulse-count-matched CPMG.
inline std::vector<SweepResult> sweep_cycle_time(int order, const std::vector<double>& cycle_times,
                                                 const NoiseModel& model,
                                                 const SweepOptions& opts = {}) {
  if (order < 1) throw std::invalid_argument("sweep_cycle_time: order must be >= 1");
  const FitWindow window = resolve_window(opts, model);
  SweepResult udd, cpmg;
  udd.series = "UDD_" + std::to_string(order);
  cpmg.series = "CPMG_" + std::to_string(order);
  udd.parameter = cpmg.parameter = "tau_c";
  udd.values = cpmg.values = cycle_times;
  udd.results.assign(cycle_times.size(), 0.0);
  cpmg.results.assign(cycle_times.size(), 0.0);
  udd.max_residuals.assign(cycle_times.size(), 0.0);
  cpmg.max_residuals.assign(cycle_times.size(), 0.0);
  detail::parallel_for_index(cycle_times.size(), opts.threads, [&](std::size_t i) {
    const double tau_c = cycle_times[i];
    const auto ru = dd_rate(udd_times(order, tau_c), model, window, opts.numerics);
    const auto rc = dd_rate(cpmg_times(order, tau_c), model, window, opts.numerics);
    udd.results[i] = ru.fit.rate;
    udd.max_residuals[i] = ru.fit.max_residual;
    cpmg.results[i] = rc.fit.rate;
    cpmg.max_residuals[i] = rc.fit.max_residual;
  });
  return {std::move(udd), std::move(cpmg)};
}

struct LabeledSequence {
  std::string label;
  PulseSequence seq;
};

// Rates for each sequence under a fast and a slow bath. The fit window should
// be a fixed experimental time span so the two baths are probed over the same
// times.
inline std::vector<SweepResult> slow_bath_comparison(const std::vector<LabeledSequence>& seqs,
                                                     const NoiseModel& model_fast,
                                                     const NoiseModel& model_slow,
                                                     const SweepOptions& opts = {}) {
  std::vector<SweepResult> out(2);
  out[0].series = "tau_B=" + std::to_string(model_fast.correlation_time());
  out[1].series = "tau_B=" + std::to_string(model_slow.correlation_time());
  for (auto& r : out) {
    r.parameter = "sequence";
    r.results.assign(seqs.size(), 0.0);
    r.max_residuals.assign(seqs.size(), 0.0);
    for (std::size_t i = 0; i < seqs.size(); ++i) r.values.push_back(static_cast<double>(i));
  }
  const FitWindow w_fast = resolve_window(opts, model_fast);
  const FitWindow w_slow = opts.fit_window ? *opts.fit_window : default_fit_window(model_slow);
  detail::parallel_for_index(seqs.size() * 2, opts.threads, [&](std::size_t k) {
    const std::size_t i = k / 2;
    if (k % 2 == 0) {
      const auto rr = dd_rate(seqs[i].seq, model_fast, w_fast, opts.numerics);
      out[0].results[i] = rr.fit.rate;
      out[0].max_residuals[i] = rr.fit.max_residual;
    } else {
      const auto rr = dd_rate(seqs[i].seq, model_slow, w_slow, opts.numerics);
      out[1].results[i] = rr.fit.rate;
      out[1].max_residuals[i] = rr.fit.max_residual;
    }
  });
  return out;
}

// Golden-section minimization of the decay rate over a scalar sequence family,
// after bracketing on a coarse grid. A flat objective (< 1% variation over the
// grid) or a boundary minimum is flagged instead of polished.
inline MinimizeResult minimize_rate(const std::function<PulseSequence(double)>& family,
                                    double lo, double hi, const NoiseModel& model,
                                    const SweepOptions& opts = {}, double param_tol = 1e-4) {
  if (!(hi > lo)) throw std::invalid_argument("minimize_rate: bad bounds");
  const FitWindow window = resolve_window(opts, model);
  auto rate_at = [&](double p) {
    return dd_rate(family(p), model, window, opts.numerics).fit.rate;
  };

  constexpr int grid_n = 13;
  std::vector<double> xs(grid_n), ys(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid_n - 1);
    ys[i] = rate_at(xs[i]);
  }
  const auto [min_it, max_it] = std::minmax_element(ys.begin(), ys.end());
  const std::size_t i_min = static_cast<std::size_t>(min_it - ys.begin());
  if (*max_it - *min_it < 0.01 * std::abs(*min_it))
    return {xs[i_min], ys[i_min], MinimizeFlag::flat};
  if (i_min == 0 || i_min == grid_n - 1)
    return {xs[i_min], ys[i_min], MinimizeFlag::boundary};

  double a = xs[i_min - 1], b = xs[i_min + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = rate_at(c), fd = rate_at(d);
  while (b - a > param_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = rate_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = rate_at(d);
    }
  }
  const double p = 0.5 * (a + b);
  return {p, rate_at(p), MinimizeFlag::ok};
}

}  // namespace ddsim
