#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddsim/filterfn.hpp"
#include "ddsim/quadrature.hpp"
#include "ddsim/sequence.hpp"
#include "ddsim/spectrum.hpp"

namespace ddsim {

struct NumericOptions {
  double abs_tol = 1e-10;  // absolute tolerance on chi
  double rel_tol = 1e-8;
  int k_max = 200;         // harmonic cutoff for Fourier sums and omega_max
  int max_panels = 400000;
};

enum class CurveSource { analytic, monte_carlo };

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> chi;
  std::vector<double> survival;
  CurveSource source = CurveSource::analytic;
  std::vector<double> stderrs;  // per-point standard errors (Monte Carlo only)
};

struct RateFit {
  double rate = 0.0;        // 1/us
  double intercept = 0.0;
  double t_min = 0.0, t_max = 0.0;
  double max_residual = 0.0;
  int n_points = 0;
};

namespace detail {

// Breakpoints for int_0^inf S(w) |F(w)|^2 dw. The filter magnitude has nulls
// every `null_spacing`; panels are seated between consecutive nulls so each
// one holds a single smooth hump. The walk stops once the peak-bound times the
// remaining spectral mass is negligible, with a 1/w^2 envelope taking over
// past the harmonic comb. Spectrum-scale points resolve S when the comb is
// coarse.
inline std::vector<double> overlap_breakpoints(const NoiseModel& model, double null_spacing,
                                               double omega_spec_max, double peak_bound,
                                               double envelope_c, double prune_tol) {
  std::vector<double> bp;
  bp.push_back(0.0);
  auto remaining_bound = [&](double w) {
    const double env = std::min(peak_bound, envelope_c / (w * w));
    return env * model.tail_mass(w);
  };
  const long long j_cap = 400000;
  double w = 0.0;
  bool done = false;
  for (long long j = 1; j <= j_cap; ++j) {
    w = static_cast<double>(j) * null_spacing;
    bp.push_back(w);
    if (w >= omega_spec_max && remaining_bound(w) < prune_tol) {
      done = true;
      break;
    }
  }
  // Geometric extension for slowly decaying spectra.
  for (int k = 0; !done && k < 600; ++k) {
    w *= 1.2;
    bp.push_back(w);
    if (remaining_bound(w) < prune_tol) done = true;
  }
  if (!done) throw numerical_error("overlap quadrature: could not bound the spectral tail");

  // Spectrum-scale points (quantiles) keep panels fine where S lives even if
  // the null comb is coarse.
  const double w_end = bp.back();
  for (int j = 1; j <= 15; ++j) {
    const double q = model.quantile(j / 16.0);
    if (q > 1e-13 * w_end && q < w_end) bp.push_back(q);
  }
  for (int j = 4; j <= 36; ++j) {
    const double q = model.quantile(1.0 - std::ldexp(1.0, -j));
    if (q > 1e-13 * w_end && q < w_end) bp.push_back(q);
  }
  std::sort(bp.begin(), bp.end());
  // Drop near-duplicates.
  std::vector<double> out;
  out.reserve(bp.size());
  for (double x : bp) {
    if (out.empty() || x - out.back() > 1e-12 * w_end) out.push_back(x);
  }
  return out;
}

template <class F2>
double chi_overlap(F2&& filter_sq, const NoiseModel& model, double null_spacing,
                   double omega_spec_max, double peak_bound, double envelope_c,
                   const NumericOptions& opts, const char* what) {
  const double b = model.coupling();
  if (b == 0.0) return 0.0;
  const double pref = sqrt_2pi * b * b;  // chi = pref * int_0^inf S |F|^2
  const double abs_tol_i = opts.abs_tol / pref;
  const auto bp = overlap_breakpoints(model, null_spacing, omega_spec_max, peak_bound,
                                      envelope_c, 0.01 * abs_tol_i);
  auto integrand = [&](double w) { return model.spectral_density(w) * filter_sq(w); };
  const auto r = integrate_breakpoints(integrand, bp, abs_tol_i, opts.rel_tol,
                                       opts.max_panels, what);
  return std::max(0.0, pref * r.value);
}

}  // namespace detail

// Free-evolution decay exponent chi(t) = (sqrt(2pi) b^2 / 2) int S |F_0|^2 dw
// (integrand even, so evaluated on [0, inf) and doubled).
inline double chi_fid(double t, const NoiseModel& model, const NumericOptions& opts = {}) {
  if (t < 0.0) throw std::invalid_argument("chi_fid: t must be >= 0");
  if (t == 0.0 || model.coupling() == 0.0) return 0.0;
  const double null_spacing = 2.0 * std::numbers::pi / t;
  const double omega_spec = std::max(10.0 / model.correlation_time(),
                                     (opts.k_max + 1.0) * null_spacing);
  const double peak = t * t / (2.0 * std::numbers::pi);
  const double env = 4.0 / (2.0 * std::numbers::pi);  // |F_0| <= 2/(sqrt(2pi) w)
  auto f2 = [t](double w) { return std::norm(filter_fid(w, t)); };
  return detail::chi_overlap(f2, model, null_spacing, omega_spec, peak, env, opts,
                             "chi_fid");
}

// Decay exponent after M cycles, evaluated at t = M * filter period.
inline double chi_dd(const PulseSequence& seq, int cycles, const NoiseModel& model,
                     const NumericOptions& opts = {}) {
  if (cycles < 1) throw std::invalid_argument("chi_dd: cycles must be >= 1");
  if (model.coupling() == 0.0) return 0.0;
  const ToggleFilter filter = toggle_filter(seq);
  const double period = filter.period;
  const double null_spacing = 2.0 * std::numbers::pi / (cycles * period);
  const double omega_spec = std::max(10.0 / model.correlation_time(),
                                     (opts.k_max + 1.0) * 2.0 * std::numbers::pi / period);
  const double m2 = static_cast<double>(cycles) * cycles;
  const double peak = m2 * period * period / (2.0 * std::numbers::pi);
  const double n_terms = 2.0 * (filter.switch_times.size() + 2.0);
  const double env = m2 * n_terms * n_terms / (2.0 * std::numbers::pi);
  auto f2 = [&](double w) { return std::norm(filter_repeated(filter, cycles, w)); };
  return detail::chi_overlap(f2, model, null_spacing, omega_spec, peak, env, opts,
                             "chi_dd");
}

inline DecayCurve decay_curve_dd(const PulseSequence& seq, const std::vector<int>& m_list,
                                 const NoiseModel& model, const NumericOptions& opts = {}) {
  const ToggleFilter filter = toggle_filter(seq);
  DecayCurve curve;
  curve.source = CurveSource::analytic;
  for (int m : m_list) {
    const double chi = chi_dd(seq, m, model, opts);
    curve.times.push_back(m * filter.period);
    curve.chi.push_back(chi);
    curve.survival.push_back(std::exp(-chi));
  }
  return curve;
}

inline DecayCurve decay_curve_fid(const std::vector<double>& times, const NoiseModel& model,
                                  const NumericOptions& opts = {}) {
  DecayCurve curve;
  curve.source = CurveSource::analytic;
  for (double t : times) {
    const double chi = chi_fid(t, model, opts);
    curve.times.push_back(t);
    curve.chi.push_back(chi);
    curve.survival.push_back(std::exp(-chi));
  }
  return curve;
}

// Least-squares slope of chi(t) over the window; the exponential-decay reading
// of the slope is only meaningful for t >> tau_B, which the default window
// [5 tau_B, 50 tau_B] enforces. Residuals are reported so misuse is visible.
inline RateFit rate_from_curve(const DecayCurve& curve, double t_min, double t_max) {
  std::vector<double> ts, cs;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] >= t_min - 1e-9 * std::abs(t_min) &&
        curve.times[i] <= t_max + 1e-9 * std::abs(t_max)) {
      ts.push_back(curve.times[i]);
      cs.push_back(curve.chi[i]);
    }
  }
  const int n = static_cast<int>(ts.size());
  if (n < 5) throw std::invalid_argument("rate_from_curve: need >= 5 samples inside the fit window");
  double mean_t = 0.0, mean_c = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_t += ts[i];
    mean_c += cs[i];
  }
  mean_t /= n;
  mean_c /= n;
  double stt = 0.0, stc = 0.0;
  for (int i = 0; i < n; ++i) {
    stt += (ts[i] - mean_t) * (ts[i] - mean_t);
    stc += (ts[i] - mean_t) * (cs[i] - mean_c);
  }
  if (!(stt > 0.0)) throw std::invalid_argument("rate_from_curve: degenerate time samples");
  RateFit fit;
  fit.rate = stc / stt;
  fit.intercept = mean_c - fit.rate * mean_t;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.n_points = n;
  for (int i = 0; i < n; ++i)
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(cs[i] - (fit.intercept + fit.rate * ts[i])));
  return fit;
}

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

inline FitWindow default_fit_window(const NoiseModel& model) {
  return {5.0 * model.correlation_time(), 50.0 * model.correlation_time()};
}

// Stroboscopic sample times (multiples of the filter period) covering the fit
// window: every multiple inside it, thinned to <= max_points, and extended to
// min_points when the period is longer than the window.
inline std::vector<int> stroboscopic_cycles(double filter_period, const FitWindow& window,
                                            int min_points = 8, int max_points = 16) {
  int m_lo = std::max(1, static_cast<int>(std::ceil(window.t_min / filter_period - 1e-9)));
  int m_hi = static_cast<int>(std::floor(window.t_max / filter_period + 1e-9));
  if (m_hi < m_lo + min_points - 1) m_hi = m_lo + min_points - 1;
  const int count = m_hi - m_lo + 1;
  const int stride = (count + max_points - 1) / max_points;
  std::vector<int> ms;
  for (int m = m_lo; m <= m_hi; m += stride) ms.push_back(m);
  return ms;
}

struct RateResult {
  RateFit fit;
  DecayCurve curve;
};

// Rate of a repeated sequence: chi sampled at cycle multiples, then fitted.
inline RateResult dd_rate(const PulseSequence& seq, const NoiseModel& model,
                          const FitWindow& window, const NumericOptions& opts = {}) {
  const ToggleFilter filter = toggle_filter(seq);
  const auto ms = stroboscopic_cycles(filter.period, window);
  RateResult r;
  r.curve = decay_curve_dd(seq, ms, model, opts);
  r.fit = rate_from_curve(r.curve, r.curve.times.front(), r.curve.times.back());
  return r;
}

// Large-M decay rate as a weighted sampling of S at the filter harmonics:
// rate = (sqrt(2pi) b^2 / 2) sum_{k != 0} |A_k|^2 S(k w0). The constant is
// fixed by agreement with the full quadrature in the M -> infinity limit.
inline double rate_harmonic(const PulseSequence& seq, const NoiseModel& model, int k_max) {
  if (k_max < 1) throw std::invalid_argument("rate_harmonic: k_max must be >= 1");
  const ToggleFilter filter = toggle_filter(seq);
  const HarmonicSpectrum h = fourier_coefficients(filter, k_max);
  const double b = model.coupling();
  double sum = std::norm(h.coeffs[0]) * model.spectral_density(0.0);
  for (int k = 1; k <= k_max; ++k)
    sum += 2.0 * std::norm(h.coeffs[static_cast<std::size_t>(k)]) *
           model.spectral_density(k * h.fundamental);
  return 0.5 * sqrt_2pi * b * b * sum;
}

}  // namespace ddsim
