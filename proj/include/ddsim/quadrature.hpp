#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "ddsim/errors.hpp"

namespace ddsim {

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double gk15_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk15_weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double g7_weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double result_kronrod = fc * gk15_weights[7];
  double result_gauss = fc * g7_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk15_nodes[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    result_kronrod += gk15_weights[j] * (f1 + f2);
    if (j % 2 == 1) result_gauss += g7_weights[j / 2] * (f1 + f2);
  }
  value = result_kronrod * h;
  error = std::abs((result_kronrod - result_gauss) * h);
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const {
    if (error != other.error) return error < other.error;
    return a < other.a;  // deterministic tie-break
  }
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over segments given by
// `breakpoints` (strictly increasing). Refines the worst panel until the
// summed error estimate satisfies max(abs_tol, rel_tol*|I|), or throws
// numerical_error once the panel budget is exhausted.
template <class F>
IntegrationResult integrate_breakpoints(F&& f, const std::vector<double>& breakpoints,
                                        double abs_tol, double rel_tol,
                                        int max_panels = 200000,
                                        const char* what = "integral") {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_breakpoints: need >= 2 breakpoints");

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, total_err = 0.0;
  int panels = 0;
  auto push_panel = [&](double a, double b) {
    double v, e;
    detail::gk15(f, a, b, v, e);
    total += v;
    total_err += e;
    heap.push({a, b, v, e});
    ++panels;
  };
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("integrate_breakpoints: breakpoints must be strictly increasing");
    push_panel(breakpoints[i], breakpoints[i + 1]);
  }

  const double min_width = 1e-14 * (breakpoints.back() - breakpoints.front());
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (panels >= max_panels) {
      std::ostringstream msg;
      msg << "quadrature did not converge for " << what << ": error " << total_err
          << " > tolerance max(" << abs_tol << ", " << rel_tol * std::abs(total)
          << ") after " << panels << " panels";
      throw numerical_error(msg.str());
    }
    detail::Panel worst = heap.top();
    heap.pop();
    if (worst.b - worst.a < min_width) {
      // Cannot refine further in double precision; accept the local estimate.
      total_err -= worst.error;
      continue;
    }
    total -= worst.value;
    total_err -= worst.error;
    double mid = 0.5 * (worst.a + worst.b);
    push_panel(worst.a, mid);
    push_panel(mid, worst.b);
  }
  return {total, total_err, panels};
}

template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                     double rel_tol, int max_panels = 200000,
                                     const char* what = "integral") {
  std::vector<double> bp = {a, b};
  return integrate_breakpoints(std::forward<F>(f), bp, abs_tol, rel_tol, max_panels, what);
}

namespace detail {

// Sum of a (eventually) alternating sequence of integrals by repeated
// averaging of partial sums (Euler transform); full double precision once the
// terms alternate with decreasing magnitude.
inline double euler_sum(const std::vector<double>& terms) {
  std::vector<double> s(terms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += terms[i];
    s[i] = acc;
  }
  while (s.size() > 1) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
    s.pop_back();
  }
  return s[0];
}

template <class F>
double gk_plain(F&& f, double a, double b) {
  double v, e;
  gk15(f, a, b, v, e);
  return v;
}

}  // namespace detail

// Sine integral Si(x) = int_0^x sin(t)/t dt. Power series for small x; for
// larger x the tail int_x^inf sin(t)/t is summed over half-periods with Euler
// acceleration. Close to machine precision everywhere.
inline double sine_integral(double x) {
  const double ax = std::abs(x);
  double si;
  if (ax <= 2.0) {
    double term = ax;
    double sum = 0.0;
    for (int k = 0; k < 16; ++k) {
      const int n = 2 * k + 1;
      sum += term / n;
      term *= -ax * ax / ((n + 1.0) * (n + 2.0));
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    si = sum;
  } else {
    auto f = [](double t) { return std::sin(t) / t; };
    const double k0 = std::ceil(ax / std::numbers::pi);
    double tail = detail::gk_plain(f, ax, k0 * std::numbers::pi);
    std::vector<double> terms;
    for (int j = 0; j < 48; ++j)
      terms.push_back(detail::gk_plain(f, (k0 + j) * std::numbers::pi,
                                       (k0 + j + 1) * std::numbers::pi));
    tail += detail::euler_sum(terms);
    si = 0.5 * std::numbers::pi - tail;
  }
  return x < 0 ? -si : si;
}

// int_X^inf cos(w*delta)/w^2 dw for X > 0 (delta may be 0 or negative).
// The head up to the first zero of the cosine is integrated on geometric
// panels (the integrand is not yet oscillatory there); the rest is an
// alternating half-period series, Euler-accelerated.
inline double cosine_tail_over_w2(double delta, double X) {
  const double a = std::abs(delta);
  if (a == 0.0) return 1.0 / X;
  auto f = [a](double u) { return std::cos(a * u) / (u * u); };
  const double k0 = std::ceil((X * a / std::numbers::pi) - 0.5);
  const double first_zero = (std::max(k0, 0.0) + 0.5) * std::numbers::pi / a;
  double head = 0.0;
  double lo = X;
  while (first_zero / lo > 2.0) {
    head += detail::gk_plain(f, lo, 2.0 * lo);
    lo *= 2.0;
  }
  head += detail::gk_plain(f, lo, first_zero);
  std::vector<double> terms;
  const double half = std::numbers::pi / a;
  for (int j = 0; j < 48; ++j)
    terms.push_back(detail::gk_plain(f, first_zero + j * half, first_zero + (j + 1) * half));
  return head + detail::euler_sum(terms);
}

namespace detail {

struct FilonCoeffs {
  double alpha, beta, gamma;
};

inline FilonCoeffs filon_coefficients(double theta) {
  FilonCoeffs c;
  if (std::abs(theta) < 0.1) {
    const double t2 = theta * theta;
    c.alpha = theta * t2 * (2.0 / 45.0 + t2 * (-2.0 / 315.0 + t2 * (2.0 / 4725.0)));
    c.beta = 2.0 / 3.0 + t2 * (2.0 / 15.0 + t2 * (-4.0 / 105.0 + t2 * (2.0 / 567.0)));
    c.gamma = 4.0 / 3.0 + t2 * (-2.0 / 15.0 + t2 * (1.0 / 210.0 + t2 * (-1.0 / 11340.0)));
  } else {
    const double s = std::sin(theta);
    const double co = std::cos(theta);
    const double t3 = theta * theta * theta;
    c.alpha = (theta * theta + theta * s * co - 2.0 * s * s) / t3;
    c.beta = 2.0 * (theta * (1.0 + co * co) - 2.0 * s * co) / t3;
    c.gamma = 4.0 * (s - theta * co) / t3;
  }
  return c;
}

}  // namespace detail

// Filon quadrature for int_a^b f(x) cos(tau*x) dx on 2n equal sub-intervals.
// The cosine factor is integrated exactly, so accuracy depends only on how
// well a parabola tracks f per double-panel; valid for any tau including 0.
template <class F>
double filon_cos(F&& f, double a, double b, int n_half_panels, double tau) {
  const int n = std::max(1, n_half_panels);
  const double h = (b - a) / (2.0 * n);
  const auto c = detail::filon_coefficients(tau * h);
  double c_even = 0.0, c_odd = 0.0;
  for (int i = 0; i <= 2 * n; ++i) {
    const double x = a + i * h;
    const double v = f(x) * std::cos(tau * x);
    if (i % 2 == 0)
      c_even += (i == 0 || i == 2 * n) ? 0.5 * v : v;
    else
      c_odd += v;
  }
  const double boundary = f(b) * std::sin(tau * b) - f(a) * std::sin(tau * a);
  return h * (c.alpha * boundary + c.beta * c_even + c.gamma * c_odd);
}

// Composite Filon cosine transform over [0, x_max] with geometrically growing
// blocks: resolves a spectrum that varies on very different scales near zero
// and in a long tail (e.g. Lorentzian) without an oscillation-limited step.
template <class F>
double filon_cos_geometric(F&& f, double x_first, double x_max, double tau,
                           int half_panels_per_block = 16, double growth = 1.6) {
  double total = filon_cos(f, 0.0, x_first, half_panels_per_block, tau);
  double lo = x_first;
  while (lo < x_max) {
    double hi = std::min(lo * growth, x_max);
    total += filon_cos(f, lo, hi, half_panels_per_block, tau);
    lo = hi;
  }
  return total;
}

}  // namespace ddsim
