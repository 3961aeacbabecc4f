#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ddsim/double_double.hpp"
#include "ddsim/sequence.hpp"

namespace ddsim {

inline constexpr double sqrt_2pi = 2.5066282746310005024;

// F_0(w, t): transform of the free-evolution window [0, t].
// (1/sqrt(2pi)) e^{-iwt/2} sin(wt/2)/(w/2); analytic limit t/sqrt(2pi) at w=0.
inline std::complex<double> filter_fid(double omega, double t) {
  if (t < 0.0) throw std::invalid_argument("filter_fid: t must be >= 0");
  const double half = 0.5 * omega * t;
  double sinc;  // sin(wt/2)/(wt/2)
  if (std::abs(half) < 1e-8) {
    sinc = 1.0 - half * half / 6.0;
  } else {
    sinc = std::sin(half) / half;
  }
  return std::polar(t * sinc / sqrt_2pi, -half);
}

namespace detail {

inline int end_sign(std::size_t n_switches) {
  // (-1)^{N+1} for N switches over the period.
  return (n_switches % 2 == 0) ? -1 : 1;
}

// Closed form (1/sqrt(2pi)) [1 + (-1)^{N+1} e^{-iwT} + 2 sum_j (-1)^j e^{-iw t_j}] / (iw).
inline std::complex<double> filter_single_closed(const ToggleFilter& f, double omega) {
  std::complex<double> acc(1.0, 0.0);
  acc += static_cast<double>(end_sign(f.switch_times.size())) *
         std::polar(1.0, -omega * f.period);
  double sign = -2.0;
  for (double t : f.switch_times) {
    acc += sign * std::polar(1.0, -omega * t);
    sign = -sign;
  }
  return acc / (std::complex<double>(0.0, omega) * sqrt_2pi);
}

// Taylor evaluation around w = 0. The numerator's moments
//   c_m = (-1)^{N+1} T^m + 2 sum_j (-1)^j t_j^m
// cancel to ~1e-30 of their largest term for high-order-flat sequences, so
// they are accumulated in double-double after an exact power-of-two rescale
// of the times. Valid (and fast) for |w T| up to ~1.
inline std::complex<double> filter_single_series(const ToggleFilter& f, double omega) {
  constexpr int m_max = 64;
  const double scale = std::ldexp(1.0, -(std::ilogb(f.period) + 1));  // T*scale in [0.5,1)
  const double t_end = f.period * scale;
  const double w = omega / scale;
  const double sgn_end = static_cast<double>(end_sign(f.switch_times.size()));

  const std::size_t n = f.switch_times.size();
  std::vector<dd_real> pow_t(n, dd_real(1.0));
  std::vector<double> t_scaled(n);
  for (std::size_t j = 0; j < n; ++j) t_scaled[j] = f.switch_times[j] * scale;
  dd_real pow_end(1.0);

  std::complex<double> sum(0.0, 0.0);
  std::complex<double> psi(-1.0, 0.0);      // (-i)^{m+1}, starts at m=1
  double p = 1.0;                            // w^{m-1}/m!
  for (int m = 1; m <= m_max; ++m) {
    pow_end = dd_mul(pow_end, t_end);
    dd_real c = dd_mul(pow_end, sgn_end);
    double sj = -2.0;
    for (std::size_t j = 0; j < n; ++j) {
      pow_t[j] = dd_mul(pow_t[j], t_scaled[j]);
      c = dd_add(c, dd_mul(pow_t[j], sj));
      sj = -sj;
    }
    sum += psi * (p * c.value());
    psi *= std::complex<double>(0.0, -1.0);
    p *= w / (m + 1);
    if (p == 0.0) break;  // remaining terms underflow
  }
  return sum / (scale * sqrt_2pi);
}

}  // namespace detail

// Transform of one period of the toggle filter. Entire in w; the w -> 0
// region (including w = 0 exactly) is handled by the series branch, which for
// a balanced filter returns ~1e-30 * period instead of cancellation noise.
inline std::complex<double> filter_single(const ToggleFilter& f, double omega) {
  if (!(f.period > 0.0)) throw std::invalid_argument("filter_single: invalid filter period");
  if (std::abs(omega) * f.period < 0.5) return detail::filter_single_series(f, omega);
  return detail::filter_single_closed(f, omega);
}

// M repetitions of the cycle: grating factor times the single-cycle filter.
// At harmonics (sin(w T/2) = 0) the ratio is replaced by its limit
// +-M, so |F_M(k w0)| = M |F_1(k w0)| holds exactly.
inline std::complex<double> filter_repeated(const ToggleFilter& f, int cycles, double omega) {
  if (cycles < 1) throw std::invalid_argument("filter_repeated: cycles must be >= 1");
  const std::complex<double> single = filter_single(f, omega);
  if (cycles == 1) return single;
  const double theta = 0.5 * omega * f.period;
  const double s = std::sin(theta);
  double ratio;
  if (std::abs(s) < 1e-12) {
    const long long k = std::llround(theta / std::numbers::pi);
    const bool odd = ((k % 2 != 0) && ((cycles - 1) % 2 != 0));
    ratio = odd ? -static_cast<double>(cycles) : static_cast<double>(cycles);
  } else {
    ratio = std::sin(cycles * theta) / s;
  }
  return ratio * std::polar(1.0, -theta * (cycles - 1)) * single;
}

// Extended-precision evaluation path. Double-precision pulse times floor the
// filter magnitude at ~1e-16 * period (the rounding of the times themselves),
// which hides the ~omega^N stop band of high-order Uhrig sequences. These
// helpers rebuild the times and the moment sums in double-double, pushing the
// floor to ~1e-32 * period. Cycle time is fixed at 1 (the stop-band shape is
// scale-invariant).
struct DdToggleFilter {
  std::vector<dd_real> switch_times;
  double period = 0.0;
};

inline DdToggleFilter udd_toggle_filter_dd(int order) {
  if (order < 1) throw std::invalid_argument("udd_toggle_filter_dd: order must be >= 1");
  DdToggleFilter f;
  std::vector<dd_real> cycle;
  for (int i = 1; i <= order; ++i) {
    const dd_real arg = dd_div(dd_mul(dd_pi(), static_cast<double>(i)),
                               dd_real(2.0 * (order + 1)));
    const dd_real s = dd_sin(arg);
    cycle.push_back(dd_mul(s, s));
  }
  if (order % 2 == 0) {
    f.period = 1.0;
    f.switch_times = cycle;
  } else {
    f.period = 2.0;
    f.switch_times = cycle;
    for (const auto& t : cycle) f.switch_times.push_back(dd_add(t, 1.0));
  }
  return f;
}

inline std::complex<double> filter_single_dd(const DdToggleFilter& f, double omega) {
  constexpr int m_max = 72;
  const double sgn_end = static_cast<double>(detail::end_sign(f.switch_times.size()));
  const std::size_t n = f.switch_times.size();
  std::vector<dd_real> pow_t(n, dd_real(1.0));
  dd_real pow_end(1.0);
  std::complex<double> sum(0.0, 0.0);
  std::complex<double> psi(-1.0, 0.0);
  double p = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    pow_end = dd_mul(pow_end, f.period);
    dd_real c = dd_mul(pow_end, sgn_end);
    double sj = -2.0;
    for (std::size_t j = 0; j < n; ++j) {
      pow_t[j] = dd_mul(pow_t[j], f.switch_times[j]);
      c = dd_add(c, dd_mul(pow_t[j], sj));
      sj = -sj;
    }
    sum += psi * (p * c.value());
    psi *= std::complex<double>(0.0, -1.0);
    p *= omega / (m + 1);
    if (p == 0.0) break;
  }
  return sum / sqrt_2pi;
}

// Fourier coefficients A_k of the periodic toggle pattern,
// A_k = (sqrt(2pi)/T) F_1(k w0), w0 = 2pi/T. Coefficients for k < 0 follow
// from A_{-k} = conj(A_k) (real filter).
struct HarmonicSpectrum {
  double fundamental = 0.0;  // w0 = 2pi / period
  std::vector<std::complex<double>> coeffs;  // index k = 0..k_max

  int k_max() const { return static_cast<int>(coeffs.size()) - 1; }

  std::complex<double> a(int k) const {
    if (k >= 0) return coeffs[static_cast<std::size_t>(k)];
    return std::conj(coeffs[static_cast<std::size_t>(-k)]);
  }

  // sum over k = -k_max..k_max of |A_k|^2; tends to 1 (f^2 == 1).
  double parseval_sum() const {
    double s = std::norm(coeffs[0]);
    for (std::size_t k = 1; k < coeffs.size(); ++k) s += 2.0 * std::norm(coeffs[k]);
    return s;
  }

  bool truncated() const { return parseval_sum() < 0.99; }
};

inline HarmonicSpectrum fourier_coefficients(const ToggleFilter& f, int k_max) {
  if (k_max < 1) throw std::invalid_argument("fourier_coefficients: k_max must be >= 1");
  HarmonicSpectrum h;
  h.fundamental = 2.0 * std::numbers::pi / f.period;
  h.coeffs.resize(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    h.coeffs[static_cast<std::size_t>(k)] =
        sqrt_2pi / f.period * filter_single(f, k * h.fundamental);
  return h;
}

}  // namespace ddsim
