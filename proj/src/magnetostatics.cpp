#include "sicyig/magnetostatics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/numeric.hpp"

namespace sicyig::magnetostatics {
namespace {

// Angle subtended at (x, d) by a face segment x' in [-T/2, T/2] a distance d
// away along z: arctan((x+T/2)/d) - arctan((x-T/2)/d) written in atan2 form,
// valid on both sides of the face and inside the thickness range.
double face_angle(double x, double d, double half_t) {
  const double a = x + half_t;
  const double b = x - half_t;
  return std::atan2(2.0 * half_t * d, d * d + a * b);
}

double face_log(double x, double d, double half_t) {
  const double a = x + half_t;
  const double b = x - half_t;
  return 0.5 * std::log((a * a + d * d) / (b * b + d * d));
}

}  // namespace

void StripeGeometry::validate() const {
  if (!(width_nm > 0.0)) throw ArgumentError("stripe width must be positive");
  if (!(thickness_nm > 0.0)) throw ArgumentError("stripe thickness must be positive");
  if (!(length_um > 0.0)) throw ArgumentError("stripe length must be positive");
  if (!(b_sat_G > 0.0)) throw ArgumentError("stripe saturation field must be positive");
}

bool StripeGeometry::long_stripe() const { return length_um * 1000.0 >= 10.0 * width_nm; }

bool StripeGeometry::contains(const Vec3& p) const {
  const Vec3 r = p - center_nm;
  return std::abs(r.x()) <= 0.5 * thickness_nm && std::abs(r.z()) <= 0.5 * width_nm;
}

Eigen::Vector2d charge_field_xz(const StripeGeometry& geom, double x, double z) {
  const double half_t = 0.5 * geom.thickness_nm;
  const double half_w = 0.5 * geom.width_nm;
  // Face charge density Ms = B_sat / 4 pi; a uniformly charged infinite strip
  // contributes 2 sigma (r - r') / |r - r'|^2 per unit width.
  const double k = geom.b_sat_G / (2.0 * constants::pi);
  const double hx = k * (face_log(x, z - half_w, half_t) - face_log(x, z + half_w, half_t));
  const double hz = k * (face_angle(x, z - half_w, half_t) - face_angle(x, z + half_w, half_t));
  return {hx, hz};
}

Vec3 stripe_field(const StripeGeometry& geom, const Vec3& point) {
  geom.validate();
  if (geom.contains(point))
    throw DomainError("stripe_field: point lies inside the stripe volume");
  const Vec3 r = point - geom.center_nm;
  const Eigen::Vector2d h = charge_field_xz(geom, r.x(), r.z());
  return {h.x(), 0.0, h.y()};
}

double bz_gradient_x(const StripeGeometry& geom, double x, double z, double step) {
  const Vec3 c = geom.center_nm;
  const double up = stripe_field(geom, c + Vec3(x + step, 0.0, z)).z();
  const double dn = stripe_field(geom, c + Vec3(x - step, 0.0, z)).z();
  return (up - dn) / (2.0 * step);
}

std::vector<FieldSample> gradient_profile(const StripeGeometry& geom, double x_lo, double x_hi,
                                          double z, double pitch, double fd_step) {
  geom.validate();
  if (!(x_hi > x_lo)) throw ArgumentError("gradient_profile: empty x range");
  if (!(x_lo - fd_step > 0.5 * geom.thickness_nm))
    throw ArgumentError("gradient_profile: x range must lie above the stripe surface");
  if (!(pitch > 0.0)) throw ArgumentError("gradient_profile: pitch must be positive");
  if (fd_step > 0.1) throw ArgumentError("gradient_profile: finite-difference step above 0.1 nm");
  const auto n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / pitch - 1e-9)) + 1;
  std::vector<FieldSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(x_hi, x_lo + pitch * static_cast<double>(i));
    FieldSample s;
    s.position_nm = geom.center_nm + Vec3(x, 0.0, z);
    s.b_dip_G = stripe_field(geom, s.position_nm);
    s.grad_bz_x_G_per_nm = bz_gradient_x(geom, x, z, fd_step);
    out.push_back(s);
  }
  return out;
}

GradientOptimum find_xopt(const StripeGeometry& geom) {
  geom.validate();
  const double half_t = 0.5 * geom.thickness_nm;
  auto g = [&](double x) { return std::abs(bz_gradient_x(geom, x, 0.0)); };
  // Coarse scan to bracket, then golden section on the bracket.
  const double step = std::max(0.5, 0.01 * geom.width_nm);
  const double lo = half_t + 0.25;
  const double hi = half_t + 4.0 * std::max(geom.width_nm, geom.thickness_nm);
  double best_x = lo, best_g = g(lo);
  for (double x = lo + step; x <= hi; x += step) {
    const double v = g(x);
    if (v > best_g) {
      best_g = v;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  const double x_opt = numeric::golden_section_max(g, a, b, 0.01);
  return {x_opt, g(x_opt)};
}

double homogeneity_report(const StripeGeometry& geom, double x, double z_half_range) {
  geom.validate();
  if (!(x > 0.5 * geom.thickness_nm))
    throw ArgumentError("homogeneity_report: x must lie above the stripe surface");
  if (z_half_range < 0.0) throw ArgumentError("homogeneity_report: negative z range");
  const Vec3 c = geom.center_nm;
  const double ref = stripe_field(geom, c + Vec3(x, 0.0, 0.0)).z();
  const auto n = static_cast<int>(std::ceil(z_half_range));
  double worst = 0.0;
  for (int i = -n; i <= n; ++i) {
    const double z = n ? z_half_range * static_cast<double>(i) / n : 0.0;
    worst = std::max(worst, std::abs(stripe_field(geom, c + Vec3(x, 0.0, z)).z() - ref));
  }
  return worst;
}

EffectiveShift effective_zeeman_shift(const StripeGeometry& geom, const Vec3& point,
                                      double b0_G) {
  if (!(b0_G > 0.0)) throw ArgumentError("effective_zeeman_shift: B0 must be positive");
  const Vec3 b = stripe_field(geom, point);
  EffectiveShift s;
  s.first_order_G = b.z();
  s.second_order_G = b.x() * b.x() / (2.0 * b0_G);
  s.total_G = s.first_order_G + s.second_order_G;
  return s;
}

double demag_factor_zz(const StripeGeometry& geom, double z) {
  geom.validate();
  if (std::abs(z) >= 0.5 * geom.width_nm)
    throw DomainError("demag_factor_zz: z outside the stripe width");
  return -charge_field_xz(geom, 0.0, z).y() / geom.b_sat_G;
}

}  // namespace sicyig::magnetostatics
