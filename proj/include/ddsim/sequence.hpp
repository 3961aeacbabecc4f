#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddsim {

// One cycle of a pi-pulse sequence. Times are pulse centers in microseconds,
// strictly increasing and strictly inside (0, cycle_time). Pulses are ideal
// (zero width, perfect pi rotations). order == pulse_times.size(); order 0 is
// free evolution over the cycle.
struct PulseSequence {
  double cycle_time = 0.0;
  std::vector<double> pulse_times;
  int order = 0;
  std::string label;
};

inline void validate_sequence(const PulseSequence& seq) {
  if (!(seq.cycle_time > 0.0)) throw std::invalid_argument("PulseSequence: cycle_time must be > 0");
  if (seq.order != static_cast<int>(seq.pulse_times.size()))
    throw std::invalid_argument("PulseSequence: order must equal number of pulse times");
  double prev = 0.0;
  for (double t : seq.pulse_times) {
    if (!(t > prev)) throw std::invalid_argument("PulseSequence: pulse times must be strictly increasing and > 0");
    prev = t;
  }
  if (!seq.pulse_times.empty() && !(seq.pulse_times.back() < seq.cycle_time))
    throw std::invalid_argument("PulseSequence: last pulse must precede cycle end");
}

// Uhrig spacing: t_i = cycle_time * sin^2(pi*i / (2(order+1))), i = 1..order.
inline PulseSequence udd_times(int order, double cycle_time) {
  if (order < 1) throw std::invalid_argument("udd_times: order must be >= 1");
  if (!(cycle_time > 0.0)) throw std::invalid_argument("udd_times: cycle_time must be > 0");
  PulseSequence seq;
  seq.cycle_time = cycle_time;
  seq.order = order;
  seq.label = "UDD";
  seq.pulse_times.reserve(order);
  for (int i = 1; i <= order; ++i) {
    const double s = std::sin(std::numbers::pi * i / (2.0 * (order + 1)));
    seq.pulse_times.push_back(cycle_time * s * s);
  }
  return seq;
}

// Equidistant pulses with half-spacing margins: t_i = (2i-1) * cycle_time / (2n).
inline PulseSequence cpmg_times(int n_pulses, double cycle_time) {
  if (n_pulses < 1) throw std::invalid_argument("cpmg_times: n_pulses must be >= 1");
  if (!(cycle_time > 0.0)) throw std::invalid_argument("cpmg_times: cycle_time must be > 0");
  PulseSequence seq;
  seq.cycle_time = cycle_time;
  seq.order = n_pulses;
  seq.label = "CPMG";
  seq.pulse_times.reserve(n_pulses);
  for (int i = 1; i <= n_pulses; ++i)
    seq.pulse_times.push_back((2.0 * i - 1.0) * cycle_time / (2.0 * n_pulses));
  return seq;
}

inline double sin2_pi_over_8() {
  const double s = std::sin(std::numbers::pi / 8.0);
  return s * s;
}

// Admissible open interval for the three-pulse deviation parameter x.
inline double three_pulse_x_lo() { return -sin2_pi_over_8(); }
inline double three_pulse_x_hi() { return 0.5 - sin2_pi_over_8(); }

// x at which the mirror-symmetric three-pulse family becomes equidistant.
inline double x_cpmg() { return 1.0 / 6.0 - sin2_pi_over_8(); }

// Mirror-symmetric three-pulse family: t1 = (sin^2(pi/8) + x) * cycle_time,
// t2 = cycle_time/2, t3 = cycle_time - t1. x = 0 reproduces the order-3 Uhrig
// spacing; x = x_cpmg() the equidistant one.
inline PulseSequence three_pulse_family(double x, double cycle_time) {
  if (!(cycle_time > 0.0)) throw std::invalid_argument("three_pulse_family: cycle_time must be > 0");
  if (!(x > three_pulse_x_lo() && x < three_pulse_x_hi()))
    throw std::invalid_argument("three_pulse_family: x outside admissible open interval");
  PulseSequence seq;
  seq.cycle_time = cycle_time;
  seq.order = 3;
  seq.label = "THREE_PULSE_X";
  const double t1 = cycle_time * (sin2_pi_over_8() + x);
  seq.pulse_times = {t1, 0.5 * cycle_time, cycle_time - t1};
  return seq;
}

// Pulse-free cycle (free induction decay baseline).
inline PulseSequence free_evolution(double cycle_time) {
  if (!(cycle_time > 0.0)) throw std::invalid_argument("free_evolution: cycle_time must be > 0");
  PulseSequence seq;
  seq.cycle_time = cycle_time;
  seq.order = 0;
  seq.label = "FID";
  return seq;
}

inline PulseSequence custom_sequence(std::vector<double> pulse_times, double cycle_time,
                                     std::string label = "CUSTOM") {
  PulseSequence seq;
  seq.cycle_time = cycle_time;
  seq.order = static_cast<int>(pulse_times.size());
  seq.pulse_times = std::move(pulse_times);
  seq.label = std::move(label);
  validate_sequence(seq);
  return seq;
}

// Periodic +-1 modulation the system-bath coupling acquires under the pulse
// train. The stored period is the true period of the pattern: one cycle for an
// even pulse count, two cycles for odd (the sign enters the second cycle
// inverted and returns to +1 only after it).
struct ToggleFilter {
  double period = 0.0;
  std::vector<double> switch_times;  // strictly inside (0, period), even count

  // Signed average of the filter over one period.
  double mean() const {
    double signed_sum = 0.0;
    double prev = 0.0;
    double sign = 1.0;
    for (double s : switch_times) {
      signed_sum += sign * (s - prev);
      prev = s;
      sign = -sign;
    }
    signed_sum += sign * (period - prev);
    return signed_sum / period;
  }
};

inline ToggleFilter toggle_filter(const PulseSequence& seq) {
  validate_sequence(seq);
  ToggleFilter f;
  if (seq.order % 2 == 0) {
    f.period = seq.cycle_time;
    f.switch_times = seq.pulse_times;
  } else {
    f.period = 2.0 * seq.cycle_time;
    f.switch_times = seq.pulse_times;
    for (double t : seq.pulse_times) f.switch_times.push_back(t + seq.cycle_time);
  }
  return f;
}

// Value of the periodic extension of the filter at time t (+1 before the
// first switch of each period).
inline int toggle_value(const ToggleFilter& f, double t) {
  double u = std::fmod(t, f.period);
  if (u < 0.0) u += f.period;
  std::size_t flips = 0;
  for (double s : f.switch_times) {
    if (s <= u) ++flips;
    else break;
  }
  return (flips % 2 == 0) ? 1 : -1;
}

}  // namespace ddsim
