#include <doctest.h>

#include <cmath>

#include "sicyig/errors.hpp"
#include "sicyig/fabstats.hpp"

using namespace sicyig;
using namespace sicyig::fabstats;

namespace {

const std::string kData = SICYIG_TEST_DATA;

int line_of(const std::string& text) {
  try {
    parse_profile_text(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST_CASE("Poisson masses and normalization") {
  CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(poisson_pmf(1.0, 3) == doctest::Approx(std::exp(-1.0) / 6.0).epsilon(1e-14));
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 2) == 0.0);
  for (double lambda : {0.1, 1.0, 7.5, 40.0}) {
    const auto h = poisson_histogram(lambda, 1.0, 1e-12);
    double sum = 0.0, mean = 0.0;
    for (const auto& b : h) {
      sum += b.probability;
      mean += b.k * b.probability;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(mean == doctest::Approx(lambda).epsilon(1e-9));
  }
}

TEST_CASE("100 devices at lambda = 1") {
  const auto h = poisson_histogram(1.0, 100.0);
  REQUIRE(h.size() >= 4);
  const long expected[] = {37, 37, 18, 6};
  for (int k = 0; k < 4; ++k) CHECK(h[static_cast<std::size_t>(k)].rounded == expected[k]);
  CHECK(std::lround(usable_yield(1.0, 0.14, 100.0)) == 5);
}

TEST_CASE("profile integration is exact for piecewise-linear data") {
  const ImplantProfile p = parse_profile_text("0 0\n10 1\n20 0\n");
  CHECK(p.total() == doctest::Approx(10.0));
  CHECK(p.integral(0, 5) == doctest::Approx(1.25));
  CHECK(p.integral(5, 15) == doctest::Approx(7.5));
  CHECK(p.integral(-5, 100) == doctest::Approx(10.0));
  CHECK(p.integral(30, 40) == 0.0);
  CHECK(depth_window_probability(p, 0, 10) == doctest::Approx(0.5));
}

TEST_CASE("units are converted to nm") {
  const ImplantProfile p = parse_profile_text("# depth_unit: angstrom\n# density_unit: per_angstrom\n0 0.1\n100 0.1\n");
  CHECK(p.depth_max() == doctest::Approx(10.0));
  CHECK(p.total() == doctest::Approx(10.0));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(line_of("0 1\n1 2\nabc 3\n") == 3);
  CHECK(line_of("# depth_unit: inch\n0 1\n") == 1);
  CHECK(line_of("0 1\n1 2 3\n") == 2);
  CHECK(line_of("0 1\n\n5 2\n4 1\n") == 4);
  CHECK(line_of("0 1\n1 -2\n") == 2);
  CHECK(line_of("# vacancies_per_ion: many\n0 1\n1 1\n") == 1);
  CHECK_THROWS_AS(parse_profile_text("0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_profile(kData + "/profiles/missing.txt"), IoError);
}

TEST_CASE("bundled 30 keV profile: one center per aperture") {
  const ImplantProfile p = parse_profile(kData + "/profiles/c30kev_zno_sio2_sic.txt");
  REQUIRE(p.declared_vacancies_per_ion);
  CHECK(p.total() == doctest::Approx(*p.declared_vacancies_per_ion).epsilon(1e-4));
  const double lambda = expected_count(p, ApertureSpec{});
  CHECK(lambda == doctest::Approx(1.0).epsilon(0.01));
  CHECK(lambda == doctest::Approx(4.4e12 / 1e14 * 3.14159265358979 * 100.0 * 0.01 * p.total()).epsilon(1e-12));
  const double windows[][3] = {{0.0, 2.5, 0.21}, {2.5, 5.0, 0.17}, {5.0, 7.5, 0.14}, {7.5, 10.0, 0.12}};
  double prev = 1.0;
  for (const auto& w : windows) {
    const double pw = depth_window_probability(p, w[0], w[1]);
    CHECK(pw == doctest::Approx(w[2]).epsilon(0.05 / w[2]));
    CHECK(pw < prev);
    prev = pw;
  }
}

TEST_CASE("bundled 5 keV profile: about 105 vacancies per aperture at 1e11") {
  const ImplantProfile p = parse_profile(kData + "/profiles/c5kev_sic.txt");
  CHECK(expected_count(p, ApertureSpec{20.0, 1e11, 1.0}) == doctest::Approx(105.0).epsilon(0.005));
}

TEST_CASE("windowed count outside the support warns and returns zero") {
  const ImplantProfile p = parse_profile_text("0 1\n10 1\n");
  std::string warning;
  CHECK(expected_count(p, ApertureSpec{}, Window{20.0, 30.0}, &warning) == 0.0);
  CHECK(warning.find("outside") != std::string::npos);
  CHECK(expected_count(p, ApertureSpec{}, Window{0.0, 5.0}) ==
        doctest::Approx(0.5 * expected_count(p, ApertureSpec{})));
}

TEST_CASE("window parsing and argument checks") {
  const Window w = parse_window("5:7.5");
  CHECK(w.z1_nm == 5.0);
  CHECK(w.z2_nm == 7.5);
  CHECK_THROWS_AS(parse_window("5-7.5"), ArgumentError);
  CHECK_THROWS_AS(parse_window("7:5"), ArgumentError);
  CHECK_THROWS_AS(parse_window("5:7x"), ArgumentError);
  CHECK_THROWS_AS(usable_yield(1.0, 1.5, 100.0), ArgumentError);
  CHECK_THROWS_AS(poisson_histogram(-1.0, 100.0), ArgumentError);
  ApertureSpec ap;
  ap.decimation = 0.0;
  CHECK_THROWS_AS(ap.validate(), ArgumentError);
}
