#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "ddsim/decay.hpp"
#include "oracles.hpp"

using namespace ddsim;

TEST_CASE("chi_fid against the closed-form time-domain integral") {
  const double tau_b = 110.0, b = 0.01;
  const auto model = gaussian_model(tau_b, b);

  SECTION("gaussian, several times") {
    for (double t : {1.1, 11.0, 110.0, 550.0, 2200.0, 5500.0}) {
      const double expect = oracles::chi_fid_gaussian(t, tau_b, b);
      CHECK(chi_fid(t, model) == Catch::Approx(expect).epsilon(1e-7));
    }
  }

  SECTION("lorentzian, several times") {
    const auto lm = lorentzian_model(23.0, 0.05);
    for (double t : {2.3, 23.0, 115.0, 460.0}) {
      const double expect = oracles::chi_fid_lorentzian(t, 23.0, 0.05);
      CHECK(chi_fid(t, lm) == Catch::Approx(expect).epsilon(1e-6));
    }
  }

  SECTION("short-time quadratic growth: chi ~ b^2 t^2 / 2 at t = tau_b/100") {
    const double t = tau_b / 100.0;
    CHECK(chi_fid(t, model) == Catch::Approx(0.5 * b * b * t * t).epsilon(0.01));
  }

  SECTION("zero coupling and zero time") {
    const auto m0 = gaussian_model(tau_b, 0.0);
    CHECK(chi_fid(500.0, m0) == 0.0);
    CHECK(chi_fid(0.0, model) == 0.0);
  }
}

TEST_CASE("rate_from_curve") {
  SECTION("exact line recovers slope with zero residual") {
    DecayCurve c;
    for (int i = 0; i <= 10; ++i) {
      c.times.push_back(10.0 * i);
      c.chi.push_back(0.01 * 10.0 * i + 0.2);
      c.survival.push_back(std::exp(-c.chi.back()));
    }
    const auto fit = rate_from_curve(c, 0.0, 100.0);
    CHECK(fit.rate == Catch::Approx(0.01).epsilon(1e-12));
    CHECK(fit.intercept == Catch::Approx(0.2).epsilon(1e-10));
    CHECK(fit.max_residual < 1e-12);
  }

  SECTION("FID long-time rate approaches sqrt(pi) b^2 tau_b / 2") {
    const double tau_b = 1.0, b = 0.1;
    const auto model = gaussian_model(tau_b, b);
    DecayCurve c;
    for (double t = 10.0; t <= 100.0; t += 10.0) {
      c.times.push_back(t);
      c.chi.push_back(chi_fid(t, model));
      c.survival.push_back(std::exp(-c.chi.back()));
    }
    const auto fit = rate_from_curve(c, 10.0, 100.0);
    const double expect = std::sqrt(std::numbers::pi) * b * b * tau_b / 2.0;  // 0.0088623
    CHECK(fit.rate == Catch::Approx(expect).epsilon(0.01));
  }

  SECTION("window without data is rejected") {
    DecayCurve c;
    for (int i = 0; i < 8; ++i) {
      c.times.push_back(i);
      c.chi.push_back(i);
      c.survival.push_back(1.0);
    }
    CHECK_THROWS_AS(rate_from_curve(c, 100.0, 200.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_from_curve(c, 0.0, 3.0), std::invalid_argument);  // only 4 points
  }
}

TEST_CASE("chi_dd under repetition") {
  const auto model = gaussian_model(110.0, 0.01);

  SECTION("linear regime: chi(2M)/chi(M) -> 2 for short cycles") {
    const auto seq = cpmg_times(2, 60.0);  // tau = 30 us << tau_b
    const double c20 = chi_dd(seq, 20, model);
    const double c40 = chi_dd(seq, 40, model);
    CHECK(c40 / c20 == Catch::Approx(2.0).epsilon(0.02));
  }

  SECTION("CPMG beats UDD_10 at equal average spacing and equal total time") {
    const double tau = 110.4;
    const auto udd10 = udd_times(10, 10.0 * tau);  // period 1104
    const auto cpmg = cpmg_times(2, 2.0 * tau);    // period 220.8
    const double chi_udd = chi_dd(udd10, 2, model);
    const double chi_cpmg = chi_dd(cpmg, 10, model);
    CHECK(chi_cpmg < chi_udd);
  }

  SECTION("zero coupling") {
    CHECK(chi_dd(cpmg_times(2, 100.0), 3, gaussian_model(110.0, 0.0)) == 0.0);
  }

  SECTION("zero-pulse sequence reproduces free evolution") {
    const auto fid = free_evolution(75.0);
    for (int m : {1, 4}) {
      CHECK(chi_dd(fid, m, model) ==
            Catch::Approx(chi_fid(m * 75.0, model)).epsilon(1e-8));
    }
  }
}

TEST_CASE("frequency-domain chi equals the time-domain double integral") {
  std::mt19937_64 rng(777);
  auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
  const NumericOptions opts;
  int done = 0;
  while (done < 5) {
    const int n = 1 + static_cast<int>(u01() * 4);
    const int m = 1 + static_cast<int>(u01() * 3);
    const double tau_b = 5.0 + 20.0 * u01();
    const double tau_c = tau_b * (0.3 + 2.0 * u01());
    std::vector<double> times;
    for (int i = 0; i < n; ++i) times.push_back(tau_c * (0.06 + 0.88 * u01()));
    std::sort(times.begin(), times.end());
    bool ok = true;
    for (int i = 1; i < n; ++i)
      if (times[i] - times[i - 1] < 0.02 * tau_c) ok = false;
    if (!ok) continue;

    const auto seq = custom_sequence(times, tau_c);
    const auto model = (done % 2 == 0) ? gaussian_model(tau_b, 0.04)
                                       : lorentzian_model(tau_b, 0.04);
    const double freq = chi_dd(seq, m, model, opts);
    const double time = oracles::chi_dd_time_domain(toggle_filter(seq), m, model);
    INFO("instance " << done << ": n=" << n << " m=" << m << " tau_c=" << tau_c);
    CHECK(freq == Catch::Approx(time).epsilon(1e-6));
    ++done;
  }
}

TEST_CASE("chi is nondecreasing in time for the in-scope models") {
  const auto model = gaussian_model(110.0, 0.01);
  SECTION("free evolution") {
    double prev = 0.0;
    for (double t = 50.0; t <= 2000.0; t += 150.0) {
      const double c = chi_fid(t, model);
      CHECK(c >= prev - 1e-12);
      prev = c;
    }
  }
  SECTION("stroboscopic DD samples") {
    for (const auto& seq : {cpmg_times(2, 220.8), udd_times(5, 552.0)}) {
      double prev = 0.0;
      for (int m = 1; m <= 24; m += 1) {
        const double c = chi_dd(seq, m, model);
        CHECK(c >= prev - 1e-12);
        prev = c;
      }
    }
  }
}

TEST_CASE("refining a fixed window helps: chi_CPMG(n pulses in t) nonincreasing") {
  const auto model = gaussian_model(110.0, 0.01);
  const double t = 600.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 32; n += 2) {
    const double c = chi_dd(cpmg_times(n, t), 1, model);
    CHECK(c <= prev * (1.0 + 1e-9));
    prev = c;
  }
}

TEST_CASE("harmonic sampling formula") {
  const auto model = gaussian_model(110.0, 0.01);
  const double tau = 110.4;

  SECTION("agrees with the full-quadrature fitted rate within 5%") {
    struct Case {
      PulseSequence seq;
    } cases[] = {{cpmg_times(2, 2.0 * tau)}, {udd_times(5, 5.0 * tau)}, {udd_times(10, 10.0 * tau)}};
    for (const auto& c : cases) {
      const double hr = rate_harmonic(c.seq, model, 200);
      const auto rr = dd_rate(c.seq, model, default_fit_window(model));
      INFO(c.seq.label << " order " << c.seq.order);
      CHECK(hr == Catch::Approx(rr.fit.rate).epsilon(0.05));
    }
  }

  SECTION("short spacing pushes all harmonics past the spectral support") {
    // Exact value is 0; the floor is the ~1e-17 A_0 leakage of rounded pulse
    // times entering through S(0).
    CHECK(rate_harmonic(cpmg_times(2, 10.0), model, 200) < 1e-30);
  }

  SECTION("higher harmonics are negligible when w0 >= 4/tau_b") {
    const auto seq = cpmg_times(2, 160.0);  // w0 = pi/80 = 4.32/tau_b
    const double r1 = rate_harmonic(seq, model, 1);
    const double r200 = rate_harmonic(seq, model, 200);
    CHECK(std::abs(r1 - r200) / r200 < 0.01);
  }
}

TEST_CASE("UDD orders cannot beat CPMG at fixed average spacing (sampled)") {
  const auto model = gaussian_model(110.0, 0.01);
  const double tau = 110.4;
  const double cpmg_rate = dd_rate(cpmg_times(2, 2.0 * tau), model, default_fit_window(model)).fit.rate;
  for (int n : {3, 5, 10, 20, 30}) {
    const double udd_rate = dd_rate(udd_times(n, n * tau), model, default_fit_window(model)).fit.rate;
    INFO("N = " << n);
    CHECK(cpmg_rate <= udd_rate);
  }
}

TEST_CASE("quadrature failure surfaces as numerical_error") {
  NumericOptions opts;
  opts.max_panels = 8;
  const auto model = gaussian_model(110.0, 0.01);
  CHECK_THROWS_AS(chi_dd(cpmg_times(2, 220.8), 20, model, opts), numerical_error);
}
