#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ddsim/sequence.hpp"
#include "ddsim/spectrum.hpp"

namespace ddsim {

struct NoiseTrajectory {
  double dt = 0.0;
  std::vector<double> samples;  // E(i*dt), unit variance by construction
  std::uint64_t seed = 0;
};

struct McResult {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<double> stderrs;
  std::vector<double> phase_variance;  // sample variance of phi; ~2*chi
  long trials = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  int n_modes = 2048;
  double dt_factor = 100.0;  // dt = tau_B / dt_factor (must be >= 50)
  int threads = 0;           // 0 = hardware concurrency
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Per-trial stream: a fixed (seed, trial) mix, so trials can run in any order
// or on any thread with bit-identical results.
inline std::mt19937_64 trial_stream(std::uint64_t seed, long trial) {
  const std::uint64_t z =
      splitmix64(splitmix64(seed) + (static_cast<std::uint64_t>(trial) + 1) *
                                        0x9E3779B97F4A7C15ull);
  return std::mt19937_64(z);
}

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Mode {
  double omega;
  double phase;
};

// Equal-probability stratified frequencies: omega_m = Q((m+u)/n) with Q the
// quantile of the normalized spectrum on [0, inf). Every mode then carries the
// same amplitude a^2 = 2/n, which makes the ensemble variance exactly 1 and
// the ensemble autocorrelation (1/n) sum cos(omega_m tau) -> g(tau).
inline std::vector<Mode> draw_modes(const NoiseModel& model, int n_modes,
                                    std::mt19937_64& rng, double omega_cap) {
  std::vector<Mode> modes(static_cast<std::size_t>(n_modes));
  for (int m = 0; m < n_modes; ++m) {
    const double p = (m + u01(rng)) / n_modes;
    double w = model.quantile(p);
    if (w > omega_cap) w = omega_cap;  // guards heavy tails against aliasing
    modes[static_cast<std::size_t>(m)] = {w, 2.0 * std::numbers::pi * u01(rng)};
  }
  return modes;
}

// sum_{i=s}^{s+len-1} e^{i x i}, via the stable half-angle grating form.
inline std::complex<double> geometric_phase_sum(double x, long long start, long long len) {
  const double half = 0.5 * x;
  const double s = std::sin(half);
  std::complex<double> ratio;
  if (std::abs(s) < 1e-14) {
    ratio = static_cast<double>(len);
  } else {
    ratio = std::polar(std::sin(len * half) / s, (len - 1) * half);
  }
  return std::polar(1.0, start * x) * ratio;
}

struct SignRuns {
  std::vector<long long> start;
  std::vector<long long> length;
  std::vector<double> sign;
  long long cells_per_period = 0;
};

// Snap the filter switches to the sample grid (cell boundaries); each run is a
// maximal block of cells with constant toggle sign.
inline SignRuns snap_filter(const ToggleFilter& filter, double dt) {
  const long long cells = std::llround(filter.period / dt);
  if (cells < 2 || std::abs(cells * dt - filter.period) > 0.5 * dt)
    throw std::invalid_argument("snap_filter: dt does not resolve the filter period");
  SignRuns runs;
  runs.cells_per_period = cells;
  long long prev = 0;
  double sign = 1.0;
  for (double s : filter.switch_times) {
    const long long idx = std::llround(s / dt);
    if (idx <= prev || idx >= cells)
      throw std::invalid_argument("snap_filter: dt too coarse, switches collide on the grid");
    runs.start.push_back(prev);
    runs.length.push_back(idx - prev);
    runs.sign.push_back(sign);
    prev = idx;
    sign = -sign;
  }
  runs.start.push_back(prev);
  runs.length.push_back(cells - prev);
  runs.sign.push_back(sign);
  return runs;
}

}  // namespace detail

// Spectral synthesis of the stationary unit-variance Gaussian field:
// E(t) = sum_m a cos(omega_m t + phi_m), a^2 = 2/n_modes, stratified omega.
// Deterministic given (model, dt, n_samples, n_modes, seed).
inline NoiseTrajectory synthesize(const NoiseModel& model, double dt, long n_samples,
                                  int n_modes, std::uint64_t seed) {
  if (!(dt > 0.0)) throw std::invalid_argument("synthesize: dt must be > 0");
  if (dt > model.correlation_time() / 50.0)
    throw std::invalid_argument("synthesize: dt must be <= tau_B/50 to resolve correlations");
  if (n_modes < 2048) throw std::invalid_argument("synthesize: n_modes must be >= 2048");
  if (n_samples < 2) throw std::invalid_argument("synthesize: need at least 2 samples");

  auto rng = detail::trial_stream(seed, 0);
  const auto modes = detail::draw_modes(model, n_modes, rng,
                                        0.98 * std::numbers::pi / dt);
  const double amp = std::sqrt(2.0 / n_modes);

  NoiseTrajectory traj;
  traj.dt = dt;
  traj.seed = seed;
  traj.samples.assign(static_cast<std::size_t>(n_samples), 0.0);
  // Per-mode rotation recurrence; states are independent across modes so the
  // inner loop vectorizes.
  std::vector<double> c(modes.size()), s(modes.size()), rc(modes.size()), rs(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    c[m] = std::cos(modes[m].phase);
    s[m] = std::sin(modes[m].phase);
    rc[m] = std::cos(modes[m].omega * dt);
    rs[m] = std::sin(modes[m].omega * dt);
  }
  for (long i = 0; i < n_samples; ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      acc += c[m];
      const double cn = c[m] * rc[m] - s[m] * rs[m];
      s[m] = s[m] * rc[m] + c[m] * rs[m];
      c[m] = cn;
    }
    traj.samples[static_cast<std::size_t>(i)] = amp * acc;
  }
  return traj;
}

// Trapezoid accumulation of phi = b int_0^{M T} f(t) E(t) dt on the trajectory
// grid. The toggle sign per cell is its value at the cell midpoint, which
// snaps each switch to the nearest cell boundary (error <= dt/2).
inline double accumulate_phase(const NoiseTrajectory& traj, const ToggleFilter& filter,
                               int cycles, double b_se) {
  if (cycles < 1) throw std::invalid_argument("accumulate_phase: cycles must be >= 1");
  const double dt = traj.dt;
  const long long cells = std::llround(cycles * filter.period / dt);
  if (cells + 1 > static_cast<long long>(traj.samples.size()))
    throw std::invalid_argument("accumulate_phase: trajectory too short for requested time");
  double acc = 0.0;
  for (long long i = 0; i < cells; ++i) {
    const int sign = toggle_value(filter, (i + 0.5) * dt);
    acc += sign * 0.5 * (traj.samples[static_cast<std::size_t>(i)] +
                         traj.samples[static_cast<std::size_t>(i + 1)]);
  }
  return b_se * acc * dt;
}

// Monte Carlo survival <cos phi> over independent trajectories, evaluated at
// t = M * filter period for each M in m_list. Per-trial phases are computed
// mode-by-mode with closed geometric sums over the snapped sign pattern --
// algebraically identical to accumulate_phase on a synthesized trajectory with
// dt = period/K, but O(modes * switches) per trial instead of O(modes * K).
inline McResult mc_survival(const PulseSequence& seq, const std::vector<int>& m_list,
                            const NoiseModel& model, long trials, std::uint64_t seed,
                            const McOptions& options = {}) {
  if (trials < 1000) throw std::invalid_argument("mc_survival: trials must be >= 1000");
  if (m_list.empty()) throw std::invalid_argument("mc_survival: m_list must not be empty");
  if (options.dt_factor < 50.0)
    throw std::invalid_argument("mc_survival: dt_factor must be >= 50 (dt <= tau_B/50)");
  if (options.n_modes < 2048) throw std::invalid_argument("mc_survival: n_modes must be >= 2048");

  const ToggleFilter filter = toggle_filter(seq);
  const double dt_target = model.correlation_time() / options.dt_factor;
  const long long k_cells = std::max<long long>(std::llround(std::ceil(filter.period / dt_target)),
                                                2 * (static_cast<long long>(filter.switch_times.size()) + 1));
  const double dt = filter.period / static_cast<double>(k_cells);
  const auto runs = detail::snap_filter(filter, dt);
  const double b = model.coupling();
  const double amp = std::sqrt(2.0 / options.n_modes);
  const double omega_cap = 0.98 * std::numbers::pi / dt;

  const std::size_t n_times = m_list.size();
  std::vector<double> phi(static_cast<std::size_t>(trials) * n_times);

  auto run_trials = [&](long t_begin, long t_end) {
    for (long trial = t_begin; trial < t_end; ++trial) {
      auto rng = detail::trial_stream(seed, trial);
      const auto modes = detail::draw_modes(model, options.n_modes, rng, omega_cap);
      double* out = &phi[static_cast<std::size_t>(trial) * n_times];
      for (std::size_t j = 0; j < n_times; ++j) out[j] = 0.0;
      for (const auto& mode : modes) {
        const double x = mode.omega * dt;
        // Trapezoid response of one period of the snapped sign pattern.
        std::complex<double> cycle_sum(0.0, 0.0);
        for (std::size_t r = 0; r < runs.start.size(); ++r)
          cycle_sum += runs.sign[r] *
                       detail::geometric_phase_sum(x, runs.start[r], runs.length[r]);
        const std::complex<double> p_cycle =
            0.5 * dt * (1.0 + std::polar(1.0, x)) * cycle_sum;
        const std::complex<double> w = amp * std::polar(1.0, mode.phase) * p_cycle;
        const double kx = static_cast<double>(runs.cells_per_period) * x;
        for (std::size_t j = 0; j < n_times; ++j) {
          const std::complex<double> grating =
              detail::geometric_phase_sum(kx, 0, m_list[j]);
          out[j] += (w * grating).real();
        }
      }
      for (std::size_t j = 0; j < n_times; ++j) out[j] *= b;
    }
  };

  int n_threads = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, 64);
  if (n_threads == 1) {
    run_trials(0, trials);
  } else {
    std::vector<std::thread> workers;
    const long chunk = (trials + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const long lo = w * chunk;
      const long hi = std::min<long>(trials, lo + chunk);
      if (lo < hi) workers.emplace_back(run_trials, lo, hi);
    }
    for (auto& th : workers) th.join();
  }

  McResult result;
  result.trials = trials;
  result.seed = seed;
  for (std::size_t j = 0; j < n_times; ++j) {
    result.times.push_back(m_list[j] * filter.period);
    double mean_cos = 0.0, mean_phi = 0.0;
    for (long t = 0; t < trials; ++t) {
      mean_cos += std::cos(phi[static_cast<std::size_t>(t) * n_times + j]);
      mean_phi += phi[static_cast<std::size_t>(t) * n_times + j];
    }
    mean_cos /= trials;
    mean_phi /= trials;
    double var_cos = 0.0, var_phi = 0.0;
    for (long t = 0; t < trials; ++t) {
      const double p = phi[static_cast<std::size_t>(t) * n_times + j];
      var_cos += (std::cos(p) - mean_cos) * (std::cos(p) - mean_cos);
      var_phi += (p - mean_phi) * (p - mean_phi);
    }
    var_cos /= std::max<long>(1, trials - 1);
    var_phi /= std::max<long>(1, trials - 1);
    result.survival.push_back(mean_cos);
    result.stderrs.push_back(std::sqrt(var_cos / trials));
    result.phase_variance.push_back(var_phi);
  }
  return result;
}

}  // namespace ddsim
