#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sicyig/magnetostatics.hpp"

namespace sicyig::deer {

/// Probe at the origin, target plane at x = dx (x is the plane normal).
struct DeerScenario {
  double dx_nm = 6.0;
  double C2D_per_nm2 = 1.0 / 49.0;
  double pB = 0.5;
  Vec3 b0_direction = Vec3::UnitZ();  // in the membrane plane, along the stripe magnetization
  double g_probe = 2.0028;
  double g_target = 2.0026;
  double t0_us = 6.25;
  std::vector<double> td_us;

  void validate() const;
  /// "normal" when B0 is along the plane normal, "in-plane" when orthogonal
  /// to it, "oblique" otherwise.
  std::string geometry_label() const;
};

struct DeerTrace {
  std::vector<double> td_us;
  std::vector<double> V;
};

struct QuadratureOptions {
  int n_phi = 64;             // minimum azimuthal points
  double r_min_nm = 0.1;      // first log shell edge
  double shell_ratio = 1.05;  // outer/inner radius of consecutive shells
  int gl_order = 8;
  double rel_tol = 1e-6;
  int max_shells = 20000;
};

/// Pair dipolar frequency (MHz) for separation r (nm).
double dipolar_frequency(const Vec3& r_nm, const Vec3& b0_direction, double g1, double g2);

/// Two-spin signal 1 - pB (1 - cos(2 pi nu td)); may be negative.
double pair_signal(double td_us, double nu_MHz, double pB);

/// Bath integral k = int int (1 - cos(2 pi nu td)) rho dphi drho (nm^2),
/// so that V = exp(-C2D pB k).
double bath_integral(const DeerScenario& sc, double td_us, const QuadratureOptions& opt = {});

/// Radius (nm) beyond which the remaining bath contribution is below the
/// relative tolerance.
double truncation_radius(const DeerScenario& sc, double td_us, const QuadratureOptions& opt = {});

/// Plane-bath signal in the linear approximation, exp(-C2D pB k).
double plane_signal(const DeerScenario& sc, double td_us, const QuadratureOptions& opt = {});

/// Shell-factorized product form prod_s (1 - pB <1 - cos>_s)^(C2D A_s).
double plane_signal_shell_product(const DeerScenario& sc, double td_us,
                                  const QuadratureOptions& opt = {});

DeerTrace time_trace(const DeerScenario& sc, const QuadratureOptions& opt = {});

struct McEstimate {
  double V = 1.0;
  double std_error = 0.0;
  std::size_t n_config = 0;
  double disc_radius_nm = 0.0;
  double mean_spins = 0.0;
};

/// Monte-Carlo average of the exact pair product over random planar Poisson
/// configurations. Deterministic for a given seed.
McEstimate mc_oracle(const DeerScenario& sc, double td_us, std::size_t n_config,
                     std::size_t n_spins_cap, std::uint64_t seed);

struct FitBounds {
  double dx_lo_nm = 2.0;
  double dx_hi_nm = 30.0;
  double C2D_lo_per_nm2 = 0.0;
  double C2D_hi_per_nm2 = 0.25;
};

struct FitResult {
  double dx_nm = 0.0;
  double C2D_per_nm2 = 0.0;
  double residual = 0.0;  // sum of squared residuals
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  bool bound_active = false;
  bool ill_conditioned = false;
  int iterations = 0;
  std::vector<std::string> flags() const;
};

/// Least-squares estimate of (dx, C2D) from a trace: log-spaced grid scan then
/// damped Gauss-Newton refinement. `geometry` supplies B0 direction and g values.
FitResult fit_plane(const DeerTrace& trace, double pB, const FitBounds& bounds,
                    const DeerScenario& geometry = {}, const QuadratureOptions& opt = {});

/// Pump flip probability from the pumped spectral fraction and the pulse
/// inversion efficiency.
double pump_probability(double spectral_fraction, double inversion_efficiency);

}  // namespace sicyig::deer
