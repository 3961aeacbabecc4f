#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddsim/errors.hpp"

namespace ddsim {

namespace detail {

// Acklam's rational approximation to the inverse normal CDF, polished with one
// Halley step against std::erfc; accurate to ~1e-15 over (0, 1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p must be in (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

inline double inverse_erf(double p) {
  return inverse_normal_cdf(0.5 * (1.0 + p)) / std::numbers::sqrt2;
}

// int_a^b f(w) cos(w*tau) dw for f linear on [a, b]; exact and stable for any
// tau including 0.
inline double linear_cos_moment(double a, double b, double fa, double fb, double tau) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  const double fm = 0.5 * (fa + fb);
  const double slope_h = 0.5 * (fb - fa);  // slope * h
  const double x = h * tau;
  double sinc, k1;
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    sinc = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    k1 = x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0);
  } else {
    sinc = std::sin(x) / x;
    k1 = (std::sin(x) - x * std::cos(x)) / (x * x);
  }
  return 2.0 * h * (fm * std::cos(m * tau) * sinc - slope_h * std::sin(m * tau) * k1);
}

}  // namespace detail

enum class SpectrumKind { gaussian, lorentzian, tabulated };

inline const char* to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::gaussian: return "gaussian";
    case SpectrumKind::lorentzian: return "lorentzian";
    case SpectrumKind::tabulated: return "tabulated";
  }
  return "?";
}

// Stationary Gaussian bath field with unit variance: g(0) = 1, all interaction
// strength lives in the coupling b_SE. S and g form a symmetric-convention
// Fourier pair, S(w) = (1/sqrt(2pi)) int g(tau) e^{-iw tau} dtau, so that
// (1/sqrt(2pi)) int S dw = g(0) = 1. The correlation time is the 1/e point of
// g. Immutable after construction.
class NoiseModel {
public:
  SpectrumKind kind() const { return kind_; }
  double correlation_time() const { return tau_b_; }
  double coupling() const { return b_se_; }

  // S(w) in microseconds; even in w.
  double spectral_density(double omega) const {
    const double w = std::abs(omega);
    switch (kind_) {
      case SpectrumKind::gaussian: {
        const double x = 0.5 * w * tau_b_;
        return tau_b_ / std::numbers::sqrt2 * std::exp(-x * x);
      }
      case SpectrumKind::lorentzian: {
        const double x = w * tau_b_;
        return std::sqrt(2.0 / std::numbers::pi) * tau_b_ / (1.0 + x * x);
      }
      case SpectrumKind::tabulated: {
        if (w >= grid_omega_.back()) return 0.0;
        const double u = w / grid_step_;
        const auto i = static_cast<std::size_t>(u);
        const double frac = u - static_cast<double>(i);
        return grid_s_[i] + frac * (grid_s_[i + 1] - grid_s_[i]);
      }
    }
    return 0.0;
  }

  // g(tau), normalized to g(0) = 1.
  double autocorrelation(double tau) const {
    const double t = std::abs(tau);
    switch (kind_) {
      case SpectrumKind::gaussian: {
        const double x = t / tau_b_;
        return std::exp(-x * x);
      }
      case SpectrumKind::lorentzian:
        return std::exp(-t / tau_b_);
      case SpectrumKind::tabulated: {
        // Exact cosine transform of the piecewise-linear table.
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid_omega_.size(); ++i)
          acc += detail::linear_cos_moment(grid_omega_[i], grid_omega_[i + 1], grid_s_[i],
                                           grid_s_[i + 1], t);
        return acc * 2.0 / std::sqrt(2.0 * std::numbers::pi);
      }
    }
    return 0.0;
  }

  // int_w^inf S(u) du; used for quadrature truncation bounds.
  double tail_mass(double omega) const {
    const double w = std::abs(omega);
    switch (kind_) {
      case SpectrumKind::gaussian:
        return std::sqrt(std::numbers::pi / 2.0) * std::erfc(0.5 * w * tau_b_);
      case SpectrumKind::lorentzian:
        return std::sqrt(2.0 / std::numbers::pi) *
               (0.5 * std::numbers::pi - std::atan(w * tau_b_));
      case SpectrumKind::tabulated: {
        if (w >= grid_omega_.back()) return 0.0;
        const double u = w / grid_step_;
        const auto i = static_cast<std::size_t>(u);
        const double s_w = spectral_density(w);
        const double partial =
            0.5 * (s_w + grid_s_[i + 1]) * (grid_omega_[i + 1] - w);
        return partial + grid_tail_[i + 1];
      }
    }
    return 0.0;
  }

  // Inverse CDF of the normalized density S(w)/int_0^inf S on w >= 0; feeds
  // stratified frequency sampling in the stochastic module.
  double quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("NoiseModel::quantile: p must be in [0,1)");
    if (p == 0.0) return 0.0;
    switch (kind_) {
      case SpectrumKind::gaussian:
        return 2.0 / tau_b_ * detail::inverse_erf(p);
      case SpectrumKind::lorentzian:
        return std::tan(0.5 * std::numbers::pi * p) / tau_b_;
      case SpectrumKind::tabulated: {
        const double total = grid_tail_[0];
        const double target = p * total;
        // grid_cum_[i] = mass below grid_omega_[i]
        auto it = std::upper_bound(grid_cum_.begin(), grid_cum_.end(), target);
        std::size_t i = (it == grid_cum_.begin()) ? 0 : (it - grid_cum_.begin() - 1);
        if (i + 1 >= grid_omega_.size()) return grid_omega_.back();
        const double rem = target - grid_cum_[i];
        const double h = grid_omega_[i + 1] - grid_omega_[i];
        const double s0 = grid_s_[i];
        const double slope = (grid_s_[i + 1] - s0) / h;
        // Solve s0*t + slope*t^2/2 = rem on [0, h].
        double t;
        if (std::abs(slope) * h < 1e-12 * std::max(s0, 1e-300)) {
          t = rem / std::max(s0, 1e-300);
        } else {
          const double disc = s0 * s0 + 2.0 * slope * rem;
          t = (std::sqrt(std::max(disc, 0.0)) - s0) / slope;
        }
        return grid_omega_[i] + std::clamp(t, 0.0, h);
      }
    }
    return 0.0;
  }

  // Largest frequency carrying spectral weight; infinity-like for the closed
  // forms is represented by the quantile near 1.
  double support_hint() const {
    if (kind_ == SpectrumKind::tabulated) return grid_omega_.back();
    return quantile(1.0 - 1e-12);
  }

  friend NoiseModel gaussian_model(double tau_b, double b_se);
  friend NoiseModel lorentzian_model(double tau_b, double b_se);
  friend NoiseModel tabulated_model(const std::vector<double>& omega,
                                    const std::vector<double>& s, double b_se);

private:
  NoiseModel() = default;

  SpectrumKind kind_ = SpectrumKind::gaussian;
  double tau_b_ = 0.0;
  double b_se_ = 0.0;
  // Tabulated data: uniform grid from 0, normalized values, suffix masses,
  // prefix masses.
  std::vector<double> grid_omega_, grid_s_, grid_tail_, grid_cum_;
  double grid_step_ = 0.0;
};

// g(tau) = exp(-(tau/tau_b)^2), S(w) = (tau_b/sqrt(2)) exp(-w^2 tau_b^2 / 4).
inline NoiseModel gaussian_model(double tau_b, double b_se) {
  if (!(tau_b > 0.0)) throw std::invalid_argument("gaussian_model: tau_b must be > 0");
  if (!(b_se >= 0.0)) throw std::invalid_argument("gaussian_model: b_se must be >= 0");
  NoiseModel m;
  m.kind_ = SpectrumKind::gaussian;
  m.tau_b_ = tau_b;
  m.b_se_ = b_se;
  return m;
}

// g(tau) = exp(-|tau|/tau_b), S(w) = sqrt(2/pi) tau_b / (1 + w^2 tau_b^2).
inline NoiseModel lorentzian_model(double tau_b, double b_se) {
  if (!(tau_b > 0.0)) throw std::invalid_argument("lorentzian_model: tau_b must be > 0");
  if (!(b_se >= 0.0)) throw std::invalid_argument("lorentzian_model: b_se must be >= 0");
  NoiseModel m;
  m.kind_ = SpectrumKind::lorentzian;
  m.tau_b_ = tau_b;
  m.b_se_ = b_se;
  return m;
}

// Sampled spectrum on a uniform nonnegative grid starting at 0. The values are
// rescaled so that (1/sqrt(2pi)) * 2 * trapz(S) = 1, i.e. g(0) = 1; the
// correlation time is located by bisection on g(tau) = 1/e.
inline NoiseModel tabulated_model(const std::vector<double>& omega,
                                  const std::vector<double>& s, double b_se) {
  if (omega.size() < 3 || omega.size() != s.size())
    throw std::invalid_argument("tabulated_model: need matching grids with >= 3 points");
  if (!(b_se >= 0.0)) throw std::invalid_argument("tabulated_model: b_se must be >= 0");
  if (omega.front() != 0.0) throw std::invalid_argument("tabulated_model: grid must start at 0");
  const double step = omega[1] - omega[0];
  if (!(step > 0.0)) throw std::invalid_argument("tabulated_model: grid must be increasing");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (std::abs(omega[i] - static_cast<double>(i) * step) > 1e-9 * omega.back())
      throw std::invalid_argument("tabulated_model: grid must be uniform");
    if (!(s[i] >= 0.0)) throw std::invalid_argument("tabulated_model: S values must be >= 0");
  }
  double trapz = 0.0;
  for (std::size_t i = 0; i + 1 < omega.size(); ++i) trapz += 0.5 * (s[i] + s[i + 1]) * step;
  if (!(trapz > 0.0)) throw std::invalid_argument("tabulated_model: spectrum is identically zero");

  NoiseModel m;
  m.kind_ = SpectrumKind::tabulated;
  m.b_se_ = b_se;
  m.grid_omega_ = omega;
  m.grid_step_ = step;
  const double scale = 0.5 * std::sqrt(2.0 * std::numbers::pi) / trapz;
  m.grid_s_.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m.grid_s_[i] = s[i] * scale;

  const std::size_t n = omega.size();
  m.grid_tail_.assign(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    m.grid_tail_[i] = m.grid_tail_[i + 1] + 0.5 * (m.grid_s_[i] + m.grid_s_[i + 1]) * step;
  m.grid_cum_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    m.grid_cum_[i] = m.grid_cum_[i - 1] + 0.5 * (m.grid_s_[i - 1] + m.grid_s_[i]) * step;

  // 1/e point of g: scan on the scale set by the mean frequency, then bisect
  // onto the first crossing.
  double mom0 = m.grid_tail_[0], mom1 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    mom1 += 0.5 * (m.grid_s_[i] * omega[i] + m.grid_s_[i + 1] * omega[i + 1]) * step;
  const double omega_mean = std::max(mom1 / mom0, 1e-300);
  const double target = std::exp(-1.0);
  const double tau_step = 0.05 / omega_mean;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int k = 1; k <= 2000000; ++k) {
    hi = k * tau_step;
    if (m.autocorrelation(hi) < target) {
      lo = (k - 1) * tau_step;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) throw numerical_error("tabulated_model: failed to bracket the 1/e point of g");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (m.autocorrelation(mid) < target) hi = mid;
    else lo = mid;
    if (hi - lo < 1e-14 * hi) break;
  }
  m.tau_b_ = 0.5 * (lo + hi);
  return m;
}

}  // namespace ddsim
