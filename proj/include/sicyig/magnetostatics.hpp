#pragma once

#include <Eigen/Core>
#include <vector>

namespace sicyig {
using Vec3 = Eigen::Vector3d;
}

namespace sicyig::magnetostatics {

// Axes: x normal to the membrane faces, y along the stripe length, z along
// the applied field and across the stripe width. Lengths in nm, fields in G.

struct StripeGeometry {
  double width_nm = 500.0;      // along z
  double thickness_nm = 100.0;  // along x
  double length_um = 100.0;     // along y
  double b_sat_G = 1700.0;      // 4 pi Ms
  Vec3 center_nm = Vec3::Zero();

  /// Throws ArgumentError on nonpositive dimensions or saturation field.
  void validate() const;
  /// Whether the infinite-length closed form is inside its validity domain
  /// (length >= 10 widths).
  bool long_stripe() const;
  /// True for points in the closed stripe volume (y ignored).
  bool contains(const Vec3& point_nm) const;
};

struct FieldSample {
  Vec3 position_nm;
  Vec3 b_dip_G;
  double grad_bz_x_G_per_nm = 0.0;
};

struct EffectiveShift {
  double first_order_G = 0.0;   // B_dz
  double second_order_G = 0.0;  // B_dx^2 / (2 B0)
  double total_G = 0.0;
};

struct GradientOptimum {
  double x_opt_nm = 0.0;
  double g_max_G_per_nm = 0.0;
};

/// Dipolar field of the z-saturated stripe, from the two charged faces at
/// z = +-W/2 with infinite length. Throws DomainError inside the stripe.
Vec3 stripe_field(const StripeGeometry& geom, const Vec3& point_nm);

/// H field of the face charges at any in-plane point, including the magnet
/// interior. Relative coordinates (x, z) from the stripe center.
Eigen::Vector2d charge_field_xz(const StripeGeometry& geom, double x_nm, double z_nm);

/// Central finite difference of B_z along x.
double bz_gradient_x(const StripeGeometry& geom, double x_nm, double z_nm,
                     double step_nm = 0.1);

/// Field and dBz/dx sampled on [x_lo, x_hi] at the given pitch; ordered by x.
std::vector<FieldSample> gradient_profile(const StripeGeometry& geom, double x_lo_nm,
                                          double x_hi_nm, double z_nm, double pitch_nm = 1.0,
                                          double fd_step_nm = 0.1);

/// Distance above the stripe center (z = 0) that maximizes |dBz/dx|.
GradientOptimum find_xopt(const StripeGeometry& geom);

/// max |Bz(x, z) - Bz(x, 0)| over |z| <= z_half_range, sampled at <= 1 nm pitch.
double homogeneity_report(const StripeGeometry& geom, double x_nm, double z_half_range_nm);

EffectiveShift effective_zeeman_shift(const StripeGeometry& geom, const Vec3& point_nm,
                                      double b0_G);

/// Demagnetizing factor N_zz(z) = -H_z / B_sat on the mid-thickness line x = 0
/// inside the magnet.
double demag_factor_zz(const StripeGeometry& geom, double z_nm);

}  // namespace sicyig::magnetostatics
