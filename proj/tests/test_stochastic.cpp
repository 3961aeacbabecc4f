#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ddsim/decay.hpp"
#include "ddsim/stochastic.hpp"

using namespace ddsim;

TEST_CASE("synthesize: determinism and validation") {
  const auto model = gaussian_model(1.0, 0.1);
  const auto a = synthesize(model, 0.02, 64, 2048, 99);
  const auto b = synthesize(model, 0.02, 64, 2048, 99);
  CHECK(a.samples == b.samples);
  const auto c = synthesize(model, 0.02, 64, 2048, 100);
  CHECK(a.samples != c.samples);

  CHECK_THROWS_AS(synthesize(model, 0.03, 64, 2048, 1), std::invalid_argument);  // dt > tau_b/50
  CHECK_THROWS_AS(synthesize(model, 0.02, 64, 1024, 1), std::invalid_argument);  // too few modes
  CHECK_THROWS_AS(synthesize(model, -0.01, 64, 2048, 1), std::invalid_argument);
}

TEST_CASE("synthesize: ensemble statistics match the model") {
  const double tau_b = 1.0;
  const auto model = gaussian_model(tau_b, 0.1);
  const double dt = tau_b / 50.0;

  SECTION("unit variance within 1% over 1000 trajectories") {
    // Average of per-trajectory time averages over spans >> tau_b.
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto traj = synthesize(model, dt, 3500, 2048, 1000 + trial);
      for (double v : traj.samples) {
        sum += v;
        sum2 += v * v;
        ++count;
      }
    }
    const double mean = sum / count;
    const double var = sum2 / count - mean * mean;
    CHECK(mean == Catch::Approx(0.0).margin(0.01));
    CHECK(var == Catch::Approx(1.0).margin(0.01));
  }

  SECTION("autocorrelation at lag tau_b is 1/e within 3 standard errors") {
    const int lag = 50;  // lag * dt = tau_b
    double sum = 0.0, sum2 = 0.0;
    const int trials = 4000;
    for (int trial = 0; trial < trials; ++trial) {
      const auto traj = synthesize(model, dt, lag + 1, 2048, 555000 + trial);
      const double prod = traj.samples.front() * traj.samples[lag];
      sum += prod;
      sum2 += prod * prod;
    }
    const double mean = sum / trials;
    const double sem = std::sqrt((sum2 / trials - mean * mean) / trials);
    CHECK(std::abs(mean - std::exp(-1.0)) < 3.0 * sem);
  }

  SECTION("near-Gaussian marginals: skewness and excess kurtosis within 0.05") {
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    long count = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto traj = synthesize(model, dt, 500, 2048, 777000 + trial);
      for (double v : traj.samples) {
        m1 += v;
        m2 += v * v;
        m3 += v * v * v;
        m4 += v * v * v * v;
        ++count;
      }
    }
    m1 /= count;
    m2 /= count;
    m3 /= count;
    m4 /= count;
    const double var = m2 - m1 * m1;
    const double skew = (m3 - 3 * m1 * var - m1 * m1 * m1) / std::pow(var, 1.5);
    const double kurt = (m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * std::pow(m1, 4)) /
                            (var * var) - 3.0;
    CHECK(std::abs(skew) < 0.05);
    CHECK(std::abs(kurt) < 0.05);
  }
}

TEST_CASE("accumulate_phase on hand-built trajectories") {
  SECTION("constant field, balanced filter, one period: phase vanishes") {
    const auto f = toggle_filter(cpmg_times(2, 2.0));  // switches at 0.5, 1.5
    NoiseTrajectory traj;
    traj.dt = 0.01;  // switches land exactly on the grid
    traj.samples.assign(201, 1.0);
    CHECK(std::abs(accumulate_phase(traj, f, 1, 0.7)) < 1e-12);
  }

  SECTION("constant field, no pulses: phase = b t") {
    const auto f = toggle_filter(free_evolution(2.0));
    NoiseTrajectory traj;
    traj.dt = 0.01;
    traj.samples.assign(201, 1.0);
    CHECK(accumulate_phase(traj, f, 1, 0.7) == Catch::Approx(0.7 * 2.0).epsilon(1e-12));
  }

  SECTION("first-harmonic field projects onto A_1 = 2/pi") {
    const auto f = toggle_filter(cpmg_times(2, 2.0));
    const double w0 = std::numbers::pi;  // 2pi / period
    NoiseTrajectory traj;
    traj.dt = 1e-4;
    const int n = 20001;
    traj.samples.resize(n);
    for (int i = 0; i < n; ++i) traj.samples[i] = std::cos(w0 * i * traj.dt);
    const double phi = accumulate_phase(traj, f, 1, 1.0);
    // int_0^T f cos(w0 t) dt = T Re A_1 = T * 2/pi
    CHECK(phi == Catch::Approx(2.0 * 2.0 / std::numbers::pi).epsilon(1e-6));
  }

  SECTION("trajectory too short is rejected") {
    const auto f = toggle_filter(cpmg_times(2, 2.0));
    NoiseTrajectory traj;
    traj.dt = 0.01;
    traj.samples.assign(150, 1.0);
    CHECK_THROWS_AS(accumulate_phase(traj, f, 1, 1.0), std::invalid_argument);
  }
}

TEST_CASE("mc_survival and the analytic exponent agree") {
  const double tau_b = 1.0;

  SECTION("free induction decay at t = tau_b and 5 tau_b") {
    const auto model = gaussian_model(tau_b, 1.2);
    const auto seq = free_evolution(tau_b);
    const auto mc = mc_survival(seq, {1, 5}, model, 4000, 2024, {2048, 100.0, 0});
    for (std::size_t i = 0; i < mc.times.size(); ++i) {
      const double expect = std::exp(-chi_fid(mc.times[i], model));
      INFO("t = " << mc.times[i]);
      CHECK(std::abs(mc.survival[i] - expect) <= 3.0 * mc.stderrs[i]);
    }
  }

  SECTION("pulsed sequence with phase-variance identity") {
    // tau ~ tau_b: chi is harmonic-dominated and the switch times land
    // exactly on the sample grid (no snapping bias).
    const auto model = gaussian_model(tau_b, 1.0);
    const auto seq = cpmg_times(2, 2.0);
    const std::vector<int> ms = {1, 4, 10};
    const auto mc = mc_survival(seq, ms, model, 4000, 7, {2048, 100.0, 0});
    for (std::size_t i = 0; i < mc.times.size(); ++i) {
      const double chi = chi_dd(seq, ms[i], model);
      INFO("t = " << mc.times[i]);
      CHECK(std::abs(mc.survival[i] - std::exp(-chi)) <= 3.0 * mc.stderrs[i]);
      CHECK(mc.phase_variance[i] == Catch::Approx(2.0 * chi).epsilon(0.05));
    }
  }

  SECTION("zero coupling: survival is exactly 1 with zero spread") {
    const auto model = gaussian_model(tau_b, 0.0);
    const auto mc = mc_survival(cpmg_times(2, 0.5), {1, 3}, model, 1000, 5, {2048, 100.0, 0});
    for (std::size_t i = 0; i < mc.times.size(); ++i) {
      CHECK(mc.survival[i] == 1.0);
      CHECK(mc.stderrs[i] == 0.0);
    }
  }

  SECTION("preconditions") {
    const auto model = gaussian_model(tau_b, 1.0);
    CHECK_THROWS_AS(mc_survival(cpmg_times(2, 0.5), {1}, model, 500, 1, {2048, 100.0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_survival(cpmg_times(2, 0.5), {1}, model, 1000, 1, {1024, 100.0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_survival(cpmg_times(2, 0.5), {1}, model, 1000, 1, {2048, 20.0, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("mc fast path reproduces accumulate_phase on synthesized trajectories") {
  // Same per-trial streams, same snapped grid: the geometric-sum evaluation
  // inside mc_survival must agree with the explicit trapezoid to rounding.
  const double tau_b = 1.0;
  const auto model = gaussian_model(tau_b, 0.9);
  const auto seq = cpmg_times(2, 0.5);
  const auto filter = toggle_filter(seq);
  const int m_max = 2;
  const long trials = 1000;

  const auto mc = mc_survival(seq, {m_max}, model, trials, 31337, {2048, 100.0, 1});

  const double dt_target = tau_b / 100.0;
  const long long k = std::llround(std::ceil(filter.period / dt_target));
  const double dt = filter.period / static_cast<double>(k);
  double mean_cos = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    NoiseTrajectory traj;
    traj.dt = dt;
    traj.seed = 31337;
    auto rng = detail::trial_stream(31337, trial);
    const auto modes =
        detail::draw_modes(model, 2048, rng, 0.98 * std::numbers::pi / dt);
    const long n = m_max * k + 1;
    traj.samples.assign(n, 0.0);
    const double amp = std::sqrt(2.0 / 2048.0);
    for (const auto& mode : modes)
      for (long i = 0; i < n; ++i)
        traj.samples[i] += amp * std::cos(mode.omega * i * dt + mode.phase);
    mean_cos += std::cos(accumulate_phase(traj, filter, m_max, model.coupling()));
  }
  mean_cos /= trials;
  CHECK(mc.survival[0] == Catch::Approx(mean_cos).margin(1e-9));
}
