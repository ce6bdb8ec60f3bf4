#include <doctest.h>

#include <cmath>
#include <random>

#include "sicyig/constants.hpp"
#include "sicyig/deer.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/parallel.hpp"

using namespace sicyig;
using namespace sicyig::deer;

namespace {

const double kPi = std::acos(-1.0);

double coupling(const DeerScenario& sc) { return constants::dipolar_MHz_nm3 * sc.g_probe * sc.g_target / 4.0; }

// Brute-force polar quadrature of the bath integral: Simpson in rho on
// [0, R], midpoint rule in phi.
double bath_bruteforce(const DeerScenario& sc, double td, int n_rho, int n_phi, double r_max) {
  const Vec3 n = sc.b0_direction.normalized();
  const double w = 2.0 * kPi * td * coupling(sc);
  const double h = r_max / n_rho;
  double sum = 0.0;
  for (int i = 0; i <= n_rho; ++i) {
    const double rho = i * h;
    const double wt = (i == 0 || i == n_rho) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double ring = 0.0;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * kPi * (k + 0.5) / n_phi;
      const Vec3 r(sc.dx_nm, rho * std::cos(phi), rho * std::sin(phi));
      const double d = r.norm();
      const double c = r.dot(n) / d;
      ring += 1.0 - std::cos(w * (1.0 - 3.0 * c * c) / (d * d * d));
    }
    sum += wt * rho * ring * 2.0 * kPi / n_phi;
  }
  return sum * h / 3.0;
}

DeerTrace make_trace(const DeerScenario& sc) {
  DeerTrace t;
  t.td_us = sc.td_us;
  for (double td : sc.td_us) t.V.push_back(plane_signal(sc, td));
  return t;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

TEST_CASE("dipolar constant and angular dependence") {
  CHECK(constants::dipolar_MHz_nm3 == doctest::Approx(52.04).epsilon(2e-4));
  CHECK(dipolar_frequency(Vec3(1, 0, 0), Vec3::UnitZ(), 2, 2) == doctest::Approx(constants::dipolar_MHz_nm3));
  const double ge = constants::free_electron_g;
  CHECK(dipolar_frequency(Vec3(1, 0, 0), Vec3::UnitZ(), ge, ge) ==
        doctest::Approx(constants::dipolar_MHz_nm3 * ge * ge / 4.0));
  CHECK(dipolar_frequency(Vec3(0, 0, 2), Vec3::UnitZ(), 2, 2) ==
        doctest::Approx(-2.0 * constants::dipolar_MHz_nm3 / 8.0));
  const double magic = std::acos(1.0 / std::sqrt(3.0));
  CHECK(std::abs(dipolar_frequency(Vec3(std::sin(magic), 0, std::cos(magic)), Vec3::UnitZ(), 2, 2)) < 1e-12);
  CHECK_THROWS_AS(dipolar_frequency(Vec3::Zero(), Vec3::UnitZ(), 2, 2), DomainError);
}

TEST_CASE("pair signal") {
  CHECK(pair_signal(0.0, 3.0, 0.5) == 1.0);
  CHECK(pair_signal(0.5, 1.0, 0.5) == doctest::Approx(0.0));
  CHECK(pair_signal(0.5, 1.0, 1.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(pair_signal(-1.0, 1.0, 0.5), ArgumentError);
}

TEST_CASE("bath integral matches brute-force quadrature, B0 along the normal") {
  DeerScenario sc;
  sc.b0_direction = Vec3::UnitX();
  for (const auto& [dx, td] : {std::pair{10.0, 3.0}, std::pair{5.0, 1.0}, std::pair{15.0, 5.0}}) {
    sc.dx_nm = dx;
    const double ref = bath_bruteforce(sc, td, 200000, 1, 2000.0);
    CHECK(bath_integral(sc, td) == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("bath integral matches brute-force quadrature, B0 in plane and oblique") {
  DeerScenario sc;
  for (const Vec3& dir : {Vec3(0, 0, 1), Vec3(0, 1, 1), Vec3(1, 0, 1)}) {
    sc.b0_direction = dir;
    for (const auto& [dx, td] : {std::pair{10.0, 3.0}, std::pair{6.0, 2.0}}) {
      sc.dx_nm = dx;
      const double ref = bath_bruteforce(sc, td, 20000, 256, 1000.0);
      CHECK(bath_integral(sc, td) == doctest::Approx(ref).epsilon(1e-5));
    }
  }
}

TEST_CASE("shell product is bounded by the linear form and agrees at weak pumping") {
  DeerScenario sc;
  for (double td : {1.0, 3.0, 5.0}) {
    const double lin = plane_signal(sc, td);
    const double shell = plane_signal_shell_product(sc, td);
    CHECK(shell <= lin + 1e-12);
    CHECK(shell >= 0.0);
  }
  // log(1 - pB m) -> -pB m, so the forms coincide as pB -> 0
  sc.pB = 0.01;
  const double lin = 1.0 - plane_signal(sc, 3.0);
  const double shell = 1.0 - plane_signal_shell_product(sc, 3.0);
  CHECK(shell == doctest::Approx(lin).epsilon(0.01));
}

TEST_CASE("trivial limits") {
  DeerScenario sc;
  CHECK(plane_signal(sc, 0.0) == 1.0);
  sc.C2D_per_nm2 = 0.0;
  CHECK(plane_signal(sc, 3.0) == 1.0);
  sc = DeerScenario{};
  sc.pB = 0.0;
  CHECK(plane_signal(sc, 3.0) == 1.0);
  CHECK(bath_integral(DeerScenario{}, 0.0) == 0.0);
}

TEST_CASE("Monte-Carlo oracle agrees with the plane model") {
  DeerScenario sc;
  sc.dx_nm = 10.0;
  for (double td : {1.0, 4.0}) {
    const McEstimate mc = mc_oracle(sc, td, 20000, 100000, 42);
    const double v = plane_signal(sc, td);
    CHECK(std::abs(mc.V - v) <= std::max(0.01 * v, 3.0 * mc.std_error));
  }
}

TEST_CASE("Monte-Carlo oracle is deterministic and thread-count independent") {
  DeerScenario sc;
  const unsigned before = parallel::thread_count();
  parallel::set_thread_count(1);
  const McEstimate a = mc_oracle(sc, 2.0, 2000, 100000, 7);
  parallel::set_thread_count(4);
  const McEstimate b = mc_oracle(sc, 2.0, 2000, 100000, 7);
  parallel::set_thread_count(before);
  CHECK(a.V == b.V);
  CHECK(a.std_error == b.std_error);
  const McEstimate c = mc_oracle(sc, 2.0, 2000, 100000, 8);
  CHECK(c.V != a.V);
  CHECK_THROWS_AS(mc_oracle(sc, 2.0, 10, 100000, 7), ArgumentError);
  CHECK_THROWS_AS(mc_oracle(sc, 2.0, 2000, 10, 7), ArgumentError);
}

TEST_CASE("1 - V orderings hold on a random grid") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    DeerScenario sc;
    sc.dx_nm = 4.0 + 12.0 * u(rng);
    const double spacing = 5.0 + 5.0 * u(rng);
    sc.C2D_per_nm2 = 1.0 / (spacing * spacing);
    const double td = 0.5 + 5.0 * u(rng);
    const double v = plane_signal(sc, td);
    DeerScenario later = sc;
    CHECK(1.0 - plane_signal(later, td + 0.5) > 1.0 - v);
    DeerScenario denser = sc;
    denser.C2D_per_nm2 *= 1.3;
    CHECK(1.0 - plane_signal(denser, td) > 1.0 - v);
    DeerScenario farther = sc;
    farther.dx_nm += 2.0;
    CHECK(1.0 - plane_signal(farther, td) < 1.0 - v);
  }
}

TEST_CASE("truncation radius grows with td") {
  DeerScenario sc;
  CHECK(truncation_radius(sc, 5.0) >= truncation_radius(sc, 1.0));
}

TEST_CASE("fit round trip") {
  DeerScenario truth;
  truth.dx_nm = 8.0;
  truth.C2D_per_nm2 = 1.0 / 36.0;
  truth.td_us = grid(0.0, 8.0, 41);
  const DeerTrace clean = make_trace(truth);
  const FitResult f0 = fit_plane(clean, truth.pB, FitBounds{}, truth);
  CHECK(f0.dx_nm == doctest::Approx(truth.dx_nm).epsilon(0.02));
  CHECK(f0.C2D_per_nm2 == doctest::Approx(truth.C2D_per_nm2).epsilon(0.02));
  CHECK_FALSE(f0.bound_active);
  CHECK_FALSE(f0.ill_conditioned);

  DeerTrace noisy = clean;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (double& v : noisy.V) v += noise(rng);
  const FitResult f1 = fit_plane(noisy, truth.pB, FitBounds{}, truth);
  CHECK(f1.dx_nm == doctest::Approx(truth.dx_nm).epsilon(0.10));
  CHECK(f1.C2D_per_nm2 == doctest::Approx(truth.C2D_per_nm2).epsilon(0.10));
  CHECK(f1.covariance(0, 0) > 0.0);
  CHECK(f1.covariance(1, 1) > 0.0);
  CHECK(f1.covariance(0, 1) == doctest::Approx(f1.covariance(1, 0)));
}

TEST_CASE("fit flags") {
  DeerScenario truth;
  truth.dx_nm = 8.0;
  truth.td_us = grid(0.0, 8.0, 21);
  FitBounds tight;
  tight.dx_lo_nm = 10.0;
  tight.dx_hi_nm = 20.0;
  const FitResult f = fit_plane(make_trace(truth), truth.pB, tight, truth);
  CHECK(f.bound_active);
  CHECK(f.flags() == std::vector<std::string>{"bound-active"});

  DeerTrace flat;
  flat.td_us = truth.td_us;
  flat.V.assign(flat.td_us.size(), 1.0);
  const FitResult g = fit_plane(flat, truth.pB, FitBounds{}, truth);
  CHECK(g.C2D_per_nm2 == doctest::Approx(0.0));
  CHECK(g.ill_conditioned);
}

TEST_CASE("fit input validation") {
  DeerTrace t;
  t.td_us = {0, 1, 2};
  t.V = {1, 0.9, 0.8};
  CHECK_THROWS_WITH_AS(fit_plane(t, 0.5, FitBounds{}), doctest::Contains("insufficient points"), ArgumentError);
  t.td_us = grid(0, 5, 10);
  t.V.assign(10, 0.9);
  FitBounds bad;
  bad.dx_hi_nm = 1.0;
  CHECK_THROWS_AS(fit_plane(t, 0.5, bad), ArgumentError);
  CHECK_THROWS_AS(fit_plane(t, 0.0, FitBounds{}), ArgumentError);
}

TEST_CASE("scenario validation") {
  DeerScenario sc;
  sc.td_us = {0.0, 13.0};
  CHECK_THROWS_WITH_AS(sc.validate(), doctest::Contains("2 t0"), ArgumentError);
  sc = DeerScenario{};
  sc.pB = 1.5;
  CHECK_THROWS_AS(plane_signal(sc, 1.0), ArgumentError);
  sc = DeerScenario{};
  sc.dx_nm = 0.0;
  CHECK_THROWS_AS(bath_integral(sc, 1.0), ArgumentError);
  CHECK(DeerScenario{}.geometry_label() == "in-plane");
  sc = DeerScenario{};
  sc.b0_direction = Vec3::UnitX();
  CHECK(sc.geometry_label() == "normal");
  QuadratureOptions q;
  q.max_shells = 3;
  CHECK_THROWS_AS(bath_integral(DeerScenario{}, 3.0, q), NumericalError);
}

TEST_CASE("pump probability") {
  CHECK(pump_probability(0.5, 0.8) == doctest::Approx(0.4));
  CHECK_THROWS_AS(pump_probability(1.2, 0.8), ArgumentError);
}
