#include <doctest.h>

#include <cmath>

#include "sicyig/errors.hpp"
#include "sicyig/snr.hpp"

using namespace sicyig;
using namespace sicyig::snr;

TEST_CASE("photon count is P T lambda / (h c)") {
  const double n = photon_count(20e-6, 1.0, 780.0);
  CHECK(n == doctest::Approx(20e-6 * 1e-6 * 780e-9 / (6.62607015e-34 * 299792458.0)).epsilon(1e-12));
}

TEST_CASE("R_opt closed form") {
  SnrBudget b;
  const double photons = photon_count(b.P0_W, b.T_integr_us, b.wavelength_nm);
  const double expected = std::exp(-2.0 * 6.25 / 12.5) * std::sqrt(0.5 * 0.4 * 1.0 * photons * 1.0);
  CHECK(r_opt(b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r_opt(b) > 5000.0 / 4.0);
  CHECK(r_opt(b) < 5000.0 * 4.0);
}

TEST_CASE("ratio identities") {
  SnrBudget b;
  const double off = snr_single_shot(b, 0.0, Mode::off_resonant);
  const double on = snr_single_shot(b, 0.0, Mode::resonant);
  CHECK(on / off == doctest::Approx(1.0 / b.X).epsilon(1e-14));
  CHECK(on / off == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(averaged_snr(1.0, 5000.0) == doctest::Approx(std::sqrt(5000.0)));
  CHECK(averaged_snr(90.0, 5000.0) == doctest::Approx(6363.96).epsilon(1e-5));

  SnrBudget pess = b;
  pess.p_coll = 0.01;
  pess.p_det = 0.04;
  const double factor = r_opt(pess) / r_opt(b);
  CHECK(factor == doctest::Approx(std::sqrt(0.0004 / 0.2)).epsilon(1e-12));
  const double r_p = averaged_snr(90.0, 5000.0) * factor;
  CHECK(r_p >= 282.0);
  CHECK(r_p <= 286.0);
}

TEST_CASE("signal scales with 1 - V") {
  CHECK(snr_single_shot(1000.0, 0.02, 0.25, Mode::resonant) == doctest::Approx(750.0));
  CHECK(snr_single_shot(1000.0, 0.02, 1.0, Mode::off_resonant) == 0.0);
  CHECK_THROWS_AS(snr_single_shot(1000.0, 0.02, 1.5, Mode::resonant), ArgumentError);
}

TEST_CASE("ensemble of probes adds sqrt(n)") {
  SnrBudget b;
  SnrBudget e = b;
  e.ensemble = true;
  e.n_probes = 16.0;
  CHECK(r_opt(e) == doctest::Approx(4.0 * r_opt(b)));
  SnrBudget ignored = b;
  ignored.n_probes = 16.0;
  CHECK(r_opt(ignored) == doctest::Approx(r_opt(b)));
}

TEST_CASE("experiment time and collection efficiency") {
  CHECK(experiment_time(5000.0, 200.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(experiment_time(5000.0, 200.0, 100.0) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(collection_efficiency(0.9, GapType::isotropic) == 0.9);
  CHECK(collection_efficiency(0.25, GapType::partial) == 0.125);
  CHECK_THROWS_AS(collection_efficiency(1.2, GapType::partial), ArgumentError);
}

TEST_CASE("X factor and area scale") {
  CHECK(x_factor(0.51, 0.49) == doctest::Approx(0.02));
  CHECK(x_factor(1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(x_factor(0.0, 0.0), DomainError);
  CHECK(default_area_nm2(780.0) == doctest::Approx(1.5 * 780.0 * 78.0));
}

TEST_CASE("budget validation and parsing") {
  SnrBudget b;
  b.T2_us = 0.0;
  CHECK_THROWS_AS(r_opt(b), ArgumentError);
  b = SnrBudget{};
  b.p_det = 1.5;
  CHECK_THROWS_AS(b.validate(), ArgumentError);
  CHECK(parse_mode("off-resonant") == Mode::off_resonant);
  CHECK(parse_mode("resonant") == Mode::resonant);
  CHECK_THROWS_AS(parse_mode("both"), ArgumentError);
  CHECK(parse_gap_type("partial") == GapType::partial);
  CHECK(to_string(Mode::resonant) == "resonant");
}
