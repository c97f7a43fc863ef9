#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "donorspin/errors.hpp"
#include "donorspin/spectroscopy.hpp"

using namespace donorspin;

namespace {

SweepConfig base_config() {
  SweepConfig cfg;  // A = -392 MHz, pump up 40 MHz at zero detuning
  cfg.grid.start_hz = -400.0e6;
  cfg.grid.stop_hz = 400.0e6;
  cfg.grid.points = 161;
  return cfg;
}

Spectrum synthetic_doublet(double c1, double d1, double c2, double d2, double width,
                           int points = 1001) {
  Spectrum s;
  ProbeGrid grid;
  grid.points = points;
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    auto lorentz = [&](double c) { return 1.0 / (1.0 + std::pow((x - c) / width, 2)); };
    s.probe_detuning_hz.push_back(x);
    s.signal.push_back(1.0 - d1 * lorentz(c1) - d2 * lorentz(c2));
  }
  return s;
}

double envelope_halfwidth(const Spectrum& s) {
  double peak = 0.0;
  for (double v : s.signal) peak = std::max(peak, v);
  const double half = 0.5 * peak;
  int lo = 0;
  while (lo < static_cast<int>(s.signal.size()) && s.signal[lo] < half) ++lo;
  int hi = static_cast<int>(s.signal.size()) - 1;
  while (hi >= 0 && s.signal[hi] < half) --hi;
  return s.probe_detuning_hz[hi] - s.probe_detuning_hz[lo];
}

}  // namespace

TEST_CASE("Gauss-Hermite nodes reproduce normal moments") {
  const auto one = gauss_hermite_nodes(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].first == 0.0);
  CHECK(one[0].second == doctest::Approx(1.0).epsilon(1e-14));

  const auto two = gauss_hermite_nodes(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].first == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(two[1].first == doctest::Approx(+1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(two[0].second == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two[1].second == doctest::Approx(0.5).epsilon(1e-14));

  // x has variance 1/2 under exp(-x^2); moments (2k-1)!! (1/2)^k exact up to
  // polynomial degree 2n-1 = 11.
  const auto nodes = gauss_hermite_nodes(6);
  double m0 = 0, m1 = 0, m2 = 0, m4 = 0, m6 = 0, m10 = 0;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [x, w] : nodes) {
    CHECK(x > prev);  // ascending
    prev = x;
    m0 += w;
    m1 += w * x;
    m2 += w * x * x;
    m4 += w * std::pow(x, 4);
    m6 += w * std::pow(x, 6);
    m10 += w * std::pow(x, 10);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(m1) < 1e-14);
  CHECK(m2 == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(m6 == doctest::Approx(1.875).epsilon(1e-13));
  CHECK(m10 == doctest::Approx(945.0 / 32.0).epsilon(1e-12));

  CHECK_THROWS_AS(gauss_hermite_nodes(0), ValidationError);
}

TEST_CASE("two-photon points sit at pump detuning +/- A/2") {
  SweepConfig cfg = base_config();
  const auto pts = two_photon_points(cfg);
  CHECK(pts[0] == doctest::Approx(-196.0e6).epsilon(1e-14));
  CHECK(pts[1] == doctest::Approx(+196.0e6).epsilon(1e-14));
  CHECK(two_photon_point(cfg, Nuclear::Up) == doctest::Approx(-196.0e6).epsilon(1e-14));
  CHECK(low_detuning_species(cfg) == Nuclear::Up);

  cfg.pump.detuning_hz = 50.0e6;
  const auto shifted = two_photon_points(cfg);
  CHECK(shifted[0] == doctest::Approx(-146.0e6).epsilon(1e-14));
  CHECK(shifted[1] == doctest::Approx(+246.0e6).epsilon(1e-14));

  cfg.pump.detuning_hz = 0.0;
  cfg.pump.branch = Branch::DownElectron;
  CHECK(two_photon_point(cfg, Nuclear::Up) == doctest::Approx(+196.0e6).epsilon(1e-14));
  CHECK(low_detuning_species(cfg) == Nuclear::Down);

  cfg.pump.branch = Branch::UpElectron;
  cfg.system.a_hyperfine_hz = +392.0e6;
  CHECK(low_detuning_species(cfg) == Nuclear::Down);

  // The nuclear Zeeman cancels out of the two-photon condition.
  SweepConfig other = base_config();
  other.system.g_nuclear = +3.1;
  CHECK(two_photon_points(other)[0] == two_photon_points(base_config())[0]);
}

TEST_CASE("synthetic doublets are recovered to a tenth of the grid step") {
  const double c1 = -196.0e6, c2 = +196.0e6;
  const Spectrum s = synthetic_doublet(c1, 0.5, c2, 0.35, 12.0e6);
  const double step = s.probe_detuning_hz[1] - s.probe_detuning_hz[0];

  const DipReport r = find_dips(s);
  REQUIRE(r.doublet);
  REQUIRE(r.dips.size() == 2);
  CHECK(std::abs(r.dips[0].detuning_hz - c1) < 0.1 * step);
  CHECK(std::abs(r.dips[1].detuning_hz - c2) < 0.1 * step);
  CHECK(r.separation_hz == doctest::Approx(c2 - c1).epsilon(2e-4));
  CHECK(r.dips[0].depth == doctest::Approx(0.5).epsilon(0.02));
  CHECK(r.dips[1].depth == doctest::Approx(0.35).epsilon(0.02));
  CHECK(r.asymmetry == doctest::Approx((0.5 - 0.35) / 0.85).epsilon(0.05));
  CHECK(extract_hyperfine_hz(r) == doctest::Approx(392.0e6).epsilon(2e-4));

  CHECK(polarization_proxy(r, Nuclear::Up) == doctest::Approx(r.asymmetry));
  CHECK(polarization_proxy(r, Nuclear::Down) == doctest::Approx(-r.asymmetry));
}

TEST_CASE("dip detection edge cases") {
  SUBCASE("monotone signal yields an empty report") {
    Spectrum s;
    for (int i = 0; i < 101; ++i) {
      s.probe_detuning_hz.push_back(i * 1.0e6);
      s.signal.push_back(1.0 + 0.01 * i);
    }
    const DipReport r = find_dips(s);
    CHECK(r.dips.empty());
    CHECK_FALSE(r.doublet);
    CHECK(std::isnan(r.separation_hz));
    CHECK(std::isnan(polarization_proxy(r, Nuclear::Up)));
    CHECK_THROWS_AS(extract_hyperfine_hz(r), NumericalError);
  }
  SUBCASE("flat signal yields an empty report") {
    Spectrum s;
    for (int i = 0; i < 11; ++i) {
      s.probe_detuning_hz.push_back(i * 1.0e6);
      s.signal.push_back(0.25);
    }
    CHECK(find_dips(s).dips.empty());
  }
  SUBCASE("a single dip is reported without a separation") {
    const Spectrum s = synthetic_doublet(-100.0e6, 0.5, -100.0e6, 0.0, 15.0e6);
    const DipReport r = find_dips(s);
    REQUIRE(r.dips.size() == 1);
    CHECK_FALSE(r.doublet);
    CHECK(std::isnan(r.separation_hz));
    CHECK_THROWS_AS(extract_hyperfine_hz(r), NumericalError);
  }
  SUBCASE("three dips: separation uses the two deepest") {
    Spectrum s = synthetic_doublet(-196.0e6, 0.5, +196.0e6, 0.45, 12.0e6);
    for (size_t i = 0; i < s.signal.size(); ++i) {
      const double x = s.probe_detuning_hz[i];
      s.signal[i] -= 0.3 / (1.0 + std::pow(x / 12.0e6, 2));
    }
    const DipReport r = find_dips(s);
    REQUIRE(r.dips.size() == 3);
    CHECK_FALSE(r.doublet);
    CHECK(r.separation_hz == doctest::Approx(392.0e6).epsilon(1e-3));
  }
  SUBCASE("too-short or inconsistent spectra are rejected") {
    Spectrum s;
    s.probe_detuning_hz = {0, 1, 2, 3};
    s.signal = {1, 0, 1, 1};
    CHECK_THROWS_AS(find_dips(s), ValidationError);
    s.probe_detuning_hz.push_back(4);
    CHECK_THROWS_AS(find_dips(s), ValidationError);
  }
}

TEST_CASE("simulated sweep resolves the hyperfine doublet deterministically") {
  const SweepConfig cfg = base_config();
  const Spectrum s1 = cpt_sweep(cfg, 1);
  const Spectrum s4 = cpt_sweep(cfg, 4);
  REQUIRE(s1.signal.size() == static_cast<size_t>(cfg.grid.points));
  for (size_t i = 0; i < s1.signal.size(); ++i) {
    CHECK(s1.signal[i] >= 0.0);
    CHECK(s1.signal[i] == s4.signal[i]);  // bitwise across thread counts
  }

  const DipReport r = find_dips(s1);
  REQUIRE(r.doublet);
  const double step = cfg.grid.step_hz();
  CHECK(std::abs(extract_hyperfine_hz(r) - 392.0e6) <= 2.0 * step);

  // Both dark resonances live inside the scanned window.
  const auto pts = two_photon_points(cfg);
  CHECK(r.dips[0].detuning_hz == doctest::Approx(pts[0]).epsilon(0.02));
  CHECK(r.dips[1].detuning_hz == doctest::Approx(pts[1]).epsilon(0.02));
}

TEST_CASE("dip separation tracks |A| across sign and magnitude") {
  for (double a : {-200.0e6, +300.0e6, -650.0e6}) {
    CAPTURE(a);
    SweepConfig cfg;
    cfg.system.a_hyperfine_hz = a;
    cfg.pump.rabi_hz = 15.0e6;
    cfg.probe_rabi_hz = 5.0e6;
    cfg.rates.w_nuc_flip_hz = 0.2e6;  // keeps both nuclear sectors occupied
    const double span = 0.75 * std::abs(a);
    cfg.grid.start_hz = -span;
    cfg.grid.stop_hz = span;
    cfg.grid.points = 61;
    const DipReport r = find_dips(cpt_sweep(cfg));
    REQUIRE(r.doublet);
    CHECK(std::abs(extract_hyperfine_hz(r) - std::abs(a)) <= 2.0 * cfg.grid.step_hz());
  }
}

TEST_CASE("a flat spectrum comes back when the pump is off") {
  SweepConfig cfg = base_config();
  cfg.pump.rabi_hz = 0.0;
  cfg.grid.points = 11;
  const Spectrum s = cpt_sweep(cfg);
  for (double v : s.signal) CHECK(v < 1e-12);
}

TEST_CASE("degenerate nuclear sectors give a single dip at the Raman condition") {
  SweepConfig cfg = base_config();
  cfg.system.a_hyperfine_hz = 0.0;
  cfg.grid.start_hz = -50.0e6;
  cfg.grid.stop_hz = 50.0e6;
  cfg.grid.points = 101;
  const DipReport r = find_dips(cpt_sweep(cfg));
  REQUIRE(r.dips.size() == 1);
  CHECK(std::abs(r.dips[0].detuning_hz - cfg.pump.detuning_hz) < cfg.grid.step_hz());
}

TEST_CASE("ensemble averaging leaves the two-photon dips in place") {
  SweepConfig cfg = base_config();
  cfg.grid.start_hz = -300.0e6;
  cfg.grid.stop_hz = 300.0e6;
  cfg.grid.points = 201;

  const DipReport narrow = find_dips(cpt_sweep(cfg));
  cfg.ensemble.fwhm_hz = 5.0e9;
  cfg.ensemble.nodes = 9;
  const DipReport broad = find_dips(cpt_sweep(cfg));
  REQUIRE(narrow.doublet);
  REQUIRE(broad.doublet);
  const double step = cfg.grid.step_hz();
  CHECK(std::abs(broad.dips[0].detuning_hz - narrow.dips[0].detuning_hz) < step);
  CHECK(std::abs(broad.dips[1].detuning_hz - narrow.dips[1].detuning_hz) < step);
  CHECK(std::abs(broad.separation_hz - narrow.separation_hz) < step);
}

TEST_CASE("ensemble averaging is the weighted sum over shifted single donors") {
  SweepConfig cfg = base_config();
  cfg.ensemble.fwhm_hz = 400.0e6;
  cfg.ensemble.nodes = 5;
  const double probe_det = -150.0e6;
  const Observables avg = observables_at(cfg, probe_det);

  double acc[6] = {};
  const auto nodes = gauss_hermite_nodes(cfg.ensemble.nodes);
  for (const auto& [x, w] : nodes) {
    SweepConfig single = cfg;
    single.ensemble = EnsembleSpec{};  // fwhm 0
    const double shift = cfg.ensemble.sigma_hz() * std::sqrt(2.0) * x;
    single.pump.detuning_hz -= shift;
    const Observables o = observables_at(single, probe_det - shift);
    for (int k = 0; k < 6; ++k) acc[k] += w * o.populations[k];
  }
  for (int k = 0; k < 6; ++k)
    CHECK(avg.populations[k] == doctest::Approx(acc[k]).epsilon(1e-12));

  // Polarizations are recomputed from the averaged populations, not averaged
  // as ratios.
  const double n_up = acc[0] + acc[2] + acc[4];
  const double n_dn = acc[1] + acc[3] + acc[5];
  CHECK(avg.nuclear_polarization ==
        doctest::Approx((n_up - n_dn) / (n_up + n_dn)).epsilon(1e-12));
}

TEST_CASE("inhomogeneous broadening widens the one-photon background") {
  SweepConfig cfg;
  cfg.pump.rabi_hz = 30.0e6;
  cfg.probe_rabi_hz = 15.0e6;
  cfg.grid.start_hz = -1.0e9;
  cfg.grid.stop_hz = 1.0e9;
  cfg.grid.points = 101;

  const double w0 = envelope_halfwidth(cpt_sweep(cfg));
  cfg.ensemble.fwhm_hz = 250.0e6;
  cfg.ensemble.nodes = 9;
  const double w1 = envelope_halfwidth(cpt_sweep(cfg));
  CHECK(w1 > w0 + 2.0 * cfg.grid.step_hz());
}

TEST_CASE("ensemble validation") {
  EnsembleSpec e;
  e.fwhm_hz = -1.0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e = EnsembleSpec{};
  e.fwhm_hz = 1.0e9;
  e.nodes = 2;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e.nodes = 300;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e.nodes = 21;
  e.validate();

  ProbeGrid g;
  g.points = 1;
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g = ProbeGrid{};
  g.stop_hz = g.start_hz;
  CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("pump power series drives the nuclear polarization and mirrors") {
  SweepConfig cfg = base_config();
  cfg.grid.points = 81;
  const std::vector<double> powers{1.0e6, 80.0e6};

  const auto up = pump_power_series(cfg, powers);
  REQUIRE(up.size() == 2);
  CHECK(up[0].pump_rabi_hz == 1.0e6);
  CHECK(up[0].nuclear_polarization > 0.5);   // dark-state trapping at weak pump
  CHECK(up[1].nuclear_polarization < -0.5);  // flip-flop cycling at strong pump
  CHECK(up[0].spectrum.signal.size() == 81);
  CHECK(up[0].dips.baseline > 0.0);

  SweepConfig mirrored = cfg;
  mirrored.pump.branch = Branch::DownElectron;
  const auto down = pump_power_series(mirrored, powers);
  for (size_t i = 0; i < powers.size(); ++i)
    CHECK(down[i].nuclear_polarization ==
          doctest::Approx(-up[i].nuclear_polarization).epsilon(1e-9));

  CHECK_THROWS_AS(pump_power_series(cfg, {1.0e6}), ValidationError);
  CHECK_THROWS_AS(pump_power_series(cfg, {1.0e6, -2.0e6}), ValidationError);
}

TEST_CASE("without nuclear-spin transport the polarization stays zero") {
  SweepConfig cfg = base_config();
  cfg.grid.points = 81;
  cfg.rates.w_flipflop_down_hz = 0.0;
  cfg.rates.w_flipflop_up_hz = 0.0;

  SUBCASE("symmetric bare flips give P_N = 0 at every power") {
    cfg.rates.w_nuc_flip_hz = 0.1e6;
    for (const PowerPoint& p : pump_power_series(cfg, {2.0e6, 30.0e6}))
      CHECK(std::abs(p.nuclear_polarization) < 1e-9);
  }
  SUBCASE("no transport at all leaves the nuclear sectors disconnected") {
    cfg.rates.w_nuc_flip_hz = 0.0;
    CHECK_THROWS_AS(pump_power_series(cfg, {2.0e6, 30.0e6}), NumericalError);
  }
}

TEST_CASE("dip asymmetry proxy agrees with P_N in sign for weak probes") {
  SweepConfig cfg = base_config();
  cfg.probe_rabi_hz = 4.0e6;
  cfg.grid.points = 401;  // 2 MHz step keeps the narrow dips resolved

  const DipReport r = find_dips(cpt_sweep(cfg));
  REQUIRE(r.doublet);
  const double proxy = polarization_proxy(r, low_detuning_species(cfg));
  const double p_n =
      observables_at(cfg, two_photon_points(cfg)[0]).nuclear_polarization;
  CHECK(proxy * p_n > 0.0);
  CHECK(std::abs(p_n) > 0.5);
}
