#pragma once

#include <cmath>

namespace ddsim {

// Minimal double-double (~32 significant digits) arithmetic, used where a sum
// of O(1) terms cancels down to ~1e-30 of its largest term (toggle-filter
// moment sums). Algorithms are the classic Dekker/Knuth error-free transforms.
struct dd_real {
  double hi = 0.0;
  double lo = 0.0;

  dd_real() = default;
  dd_real(double h) : hi(h), lo(0.0) {}
  dd_real(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

namespace detail {

inline dd_real two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd_real quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd_real two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline dd_real dd_add(const dd_real& a, const dd_real& b) {
  dd_real s = detail::two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return detail::quick_two_sum(s.hi, lo);
}

inline dd_real dd_add(const dd_real& a, double b) { return dd_add(a, dd_real(b)); }

inline dd_real dd_mul(const dd_real& a, const dd_real& b) {
  dd_real p = detail::two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, lo);
}

inline dd_real dd_mul(const dd_real& a, double b) { return dd_mul(a, dd_real(b)); }

inline dd_real dd_neg(const dd_real& a) { return {-a.hi, -a.lo}; }

inline dd_real dd_sub(const dd_real& a, const dd_real& b) { return dd_add(a, dd_neg(b)); }

inline dd_real dd_div(const dd_real& a, const dd_real& b) {
  double q0 = a.hi / b.hi;
  dd_real r = dd_sub(a, dd_mul(b, q0));
  double q1 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, q1));
  double q2 = r.hi / b.hi;
  dd_real q = dd_add(detail::two_sum(q0, q1), q2);
  return q;
}

inline const dd_real& dd_pi() {
  static const dd_real pi(3.141592653589793116, 1.2246467991473531772e-16);
  return pi;
}

// sin(x) by Taylor series for |x| <= pi/2 (all this library needs).
inline dd_real dd_sin(const dd_real& x) {
  dd_real term = x;
  dd_real sum = x;
  dd_real x2 = dd_mul(x, x);
  for (int k = 1; k <= 20; ++k) {
    term = dd_mul(term, x2);
    term = dd_div(term, dd_real(-static_cast<double>(2 * k) * (2 * k + 1)));
    sum = dd_add(sum, term);
    if (std::abs(term.hi) < 1e-40 * std::abs(sum.hi)) break;
  }
  return sum;
}

}  // namespace ddsim
