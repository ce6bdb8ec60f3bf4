#include <doctest.h>

#include <cmath>

#include "sicyig/errors.hpp"
#include "sicyig/magnetostatics.hpp"

using namespace sicyig;
using namespace sicyig::magnetostatics;

namespace {

const double kPi = std::acos(-1.0);

// Field of the two charged faces by composite Simpson over the face height.
// Each face element is a line along y of length L (infinite when L <= 0).
Vec3 face_quadrature(const StripeGeometry& g, double x, double z, double length_nm = 0.0) {
  const int n = 20000;
  const double sigma = g.b_sat_G / (4.0 * kPi);
  const double h = g.thickness_nm / n;
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i <= n; ++i) {
    const double xp = -0.5 * g.thickness_nm + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int face = 0; face < 2; ++face) {
      const double zp = face == 0 ? 0.5 * g.width_nm : -0.5 * g.width_nm;
      const double q = face == 0 ? sigma : -sigma;
      const double dx = x - xp, dz = z - zp;
      const double rho2 = dx * dx + dz * dz;
      const double per = length_nm > 0.0
                             ? length_nm / (std::sqrt(rho2) * std::sqrt(rho2 + 0.25 * length_nm * length_nm))
                             : 2.0 / std::sqrt(rho2);
      const double s = w * q * per / std::sqrt(rho2);
      sum += Vec3(s * dx, 0.0, s * dz);
    }
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("closed form matches direct quadrature over the face charges") {
  StripeGeometry g;
  const double pts[][2] = {{60, 0}, {150, 0}, {150, 200}, {80, 249}, {300, -400}, {-120, 30}, {0, 300}};
  for (const auto& p : pts) {
    const Vec3 b = stripe_field(g, Vec3(p[0], 0, p[1]));
    const Vec3 q = face_quadrature(g, p[0], p[1]);
    CHECK((b - q).norm() <= 1e-6 * q.norm());
  }
}

TEST_CASE("long finite stripe converges to the infinite closed form") {
  StripeGeometry g;
  const Vec3 b = stripe_field(g, Vec3(150, 0, 0));
  const Vec3 q = face_quadrature(g, 150, 0, 1e3 * g.length_um);
  CHECK(std::abs(b.z() - q.z()) <= 1e-4 * std::abs(q.z()));
  const Vec3 q10 = face_quadrature(g, 150, 0, 10.0 * g.width_nm);
  CHECK(std::abs(b.z() - q10.z()) <= 0.02 * std::abs(q10.z()));
}

TEST_CASE("far field is that of a line dipole") {
  StripeGeometry g;
  const double x = 2e5;
  const double line_dipole = -g.b_sat_G * g.width_nm * g.thickness_nm / (2.0 * kPi * x * x);
  CHECK(stripe_field(g, Vec3(x, 0, 0)).z() == doctest::Approx(line_dipole).epsilon(1e-6));
  const double along = g.b_sat_G * g.width_nm * g.thickness_nm / (2.0 * kPi * x * x);
  CHECK(stripe_field(g, Vec3(0, 0, x)).z() == doctest::Approx(along).epsilon(1e-6));
}

TEST_CASE("outside field is divergence and curl free") {
  StripeGeometry g;
  const double h = 1e-3;
  for (const auto& p : {Vec3(120, 0, 40), Vec3(200, 0, -260), Vec3(70, 0, 0)}) {
    auto f = [&](double dx, double dz) { return stripe_field(g, p + Vec3(dx, 0, dz)); };
    const double dbx_dx = (f(h, 0).x() - f(-h, 0).x()) / (2 * h);
    const double dbz_dz = (f(0, h).z() - f(0, -h).z()) / (2 * h);
    const double dbx_dz = (f(0, h).x() - f(0, -h).x()) / (2 * h);
    const double dbz_dx = (f(h, 0).z() - f(-h, 0).z()) / (2 * h);
    const double scale = std::abs(dbz_dx) + std::abs(dbx_dx);
    CHECK(std::abs(dbx_dx + dbz_dz) <= 1e-5 * scale);
    CHECK(std::abs(dbx_dz - dbz_dx) <= 1e-5 * scale);
  }
}

TEST_CASE("mirror symmetries") {
  StripeGeometry g;
  const Vec3 a = stripe_field(g, Vec3(130, 0, 70));
  const Vec3 b = stripe_field(g, Vec3(130, 0, -70));
  const Vec3 c = stripe_field(g, Vec3(-130, 0, 70));
  CHECK(a.z() == doctest::Approx(b.z()).epsilon(1e-13));
  CHECK(a.x() == doctest::Approx(-b.x()).epsilon(1e-13));
  CHECK(a.z() == doctest::Approx(c.z()).epsilon(1e-13));
  CHECK(a.x() == doctest::Approx(-c.x()).epsilon(1e-13));
  CHECK(a.y() == 0.0);
}

TEST_CASE("field scales linearly with the saturation field") {
  StripeGeometry g;
  StripeGeometry g2 = g;
  g2.b_sat_G = 3.0 * g.b_sat_G;
  const Vec3 p(150, 0, 33);
  CHECK((stripe_field(g2, p) - 3.0 * stripe_field(g, p)).norm() <= 1e-12 * stripe_field(g2, p).norm());
  CHECK(find_xopt(g2).x_opt_nm == doctest::Approx(find_xopt(g).x_opt_nm).epsilon(1e-4));
  CHECK(find_xopt(g2).g_max_G_per_nm == doctest::Approx(3.0 * find_xopt(g).g_max_G_per_nm).epsilon(1e-6));
}

TEST_CASE("gradient converges under Richardson extrapolation") {
  StripeGeometry g;
  const double x = 150, z = 0;
  const double d1 = bz_gradient_x(g, x, z, 0.1);
  const double d2 = bz_gradient_x(g, x, z, 0.05);
  const double extrapolated = (4.0 * d2 - d1) / 3.0;
  CHECK(std::abs(d1 - extrapolated) <= 1e-6 * std::abs(extrapolated));
}

TEST_CASE("x_opt grows and the peak gradient falls with stripe width") {
  double prev_x = 0.0, prev_g = 1e9;
  for (double w : {400.0, 500.0, 600.0, 800.0}) {
    StripeGeometry g;
    g.width_nm = w;
    const GradientOptimum o = find_xopt(g);
    CHECK(o.x_opt_nm > prev_x);
    CHECK(o.g_max_G_per_nm < prev_g);
    prev_x = o.x_opt_nm;
    prev_g = o.g_max_G_per_nm;
  }
}

TEST_CASE("x_opt is a maximum of the gradient magnitude") {
  StripeGeometry g;
  const GradientOptimum o = find_xopt(g);
  CHECK(o.x_opt_nm == doctest::Approx(150.0).epsilon(10.0 / 150.0));
  CHECK(std::abs(bz_gradient_x(g, o.x_opt_nm - 2.0, 0)) < o.g_max_G_per_nm);
  CHECK(std::abs(bz_gradient_x(g, o.x_opt_nm + 2.0, 0)) < o.g_max_G_per_nm);
}

TEST_CASE("demagnetizing factor") {
  StripeGeometry square;
  square.width_nm = 100.0;
  square.thickness_nm = 100.0;
  CHECK(demag_factor_zz(square, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  StripeGeometry thin;
  thin.width_nm = 1e5;
  thin.thickness_nm = 10.0;
  CHECK(demag_factor_zz(thin, 0.0) < 1e-3);
  StripeGeometry g;
  CHECK(demag_factor_zz(g, 240.0) > demag_factor_zz(g, 0.0));
  CHECK_THROWS_AS(demag_factor_zz(g, 250.0), DomainError);
}

TEST_CASE("effective shift adds the transverse second-order term") {
  StripeGeometry g;
  const Vec3 p(150, 0, 100);
  const Vec3 b = stripe_field(g, p);
  const EffectiveShift s = effective_zeeman_shift(g, p, 3460.0);
  CHECK(s.first_order_G == b.z());
  CHECK(s.second_order_G == doctest::Approx(b.x() * b.x() / (2 * 3460.0)));
  CHECK(s.total_G == doctest::Approx(s.first_order_G + s.second_order_G));
}

TEST_CASE("homogeneity at x_opt") {
  StripeGeometry g;
  const double x = find_xopt(g).x_opt_nm;
  CHECK(homogeneity_report(g, x, 30.0) <= 0.1);
  CHECK(homogeneity_report(g, x - 10.0, 30.0) <= 0.3);
  CHECK(homogeneity_report(g, x, 0.0) == 0.0);
}

TEST_CASE("gradient profile ordering and bounds") {
  StripeGeometry g;
  const auto prof = gradient_profile(g, 60, 300, 0, 10);
  REQUIRE(prof.size() == 25);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].position_nm.x() > prof[i - 1].position_nm.x());
  CHECK_THROWS_AS(gradient_profile(g, 40, 300, 0), ArgumentError);
  CHECK_THROWS_AS(gradient_profile(g, 300, 60, 0), ArgumentError);
}

TEST_CASE("invalid geometry and interior points") {
  StripeGeometry g;
  CHECK_THROWS_AS(stripe_field(g, Vec3(0, 0, 0)), DomainError);
  CHECK_THROWS_AS(stripe_field(g, Vec3(50, 0, 250)), DomainError);
  StripeGeometry bad = g;
  bad.width_nm = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = g;
  bad.b_sat_G = -1.0;
  CHECK_THROWS_AS(find_xopt(bad), ArgumentError);
  CHECK(g.long_stripe());
  StripeGeometry short_one = g;
  short_one.length_um = 1.0;
  CHECK_FALSE(short_one.long_stripe());
}
