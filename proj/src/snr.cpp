#include "sicyig/snr.hpp"

#include <cmath>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"

namespace sicyig::snr {

namespace {

bool unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SnrBudget::validate() const {
  if (!(T2_us > 0.0)) throw ArgumentError("snr: T2 must be positive");
  if (!(P0_W > 0.0)) throw ArgumentError("snr: P0 must be positive");
  if (!(t0_us >= 0.0)) throw ArgumentError("snr: t0 must be >= 0");
  if (!(wavelength_nm > 0.0)) throw ArgumentError("snr: wavelength must be positive");
  if (!(T_integr_us > 0.0)) throw ArgumentError("snr: integration time must be positive");
  if (!unit_interval(p_coll) || !unit_interval(p_det))
    throw ArgumentError("snr: p_coll and p_det must lie in [0, 1]");
  if (!(sigma_over_A > 0.0 && sigma_over_A <= 1.0))
    throw ArgumentError("snr: sigma/A must lie in (0, 1]");
  if (!unit_interval(phi_H) || !unit_interval(phi_L))
    throw ArgumentError("snr: quantum yields must lie in [0, 1]");
  if (!(X >= -1.0 && X <= 1.0)) throw ArgumentError("snr: X must lie in [-1, 1]");
  if (!(n_cycles >= 1.0)) throw ArgumentError("snr: n_cycles must be >= 1");
  if (!(T_rep_us > 0.0)) throw ArgumentError("snr: T_rep must be positive");
  if (!(n_probes >= 1.0)) throw ArgumentError("snr: n_probes must be >= 1");
}

double SnrBudget::mean_yield() const { return 0.5 * (phi_H + phi_L); }

double x_factor(double phi_H, double phi_L) {
  if (!unit_interval(phi_H) || !unit_interval(phi_L))
    throw ArgumentError("x_factor: quantum yields must lie in [0, 1]");
  if (phi_H + phi_L == 0.0) throw DomainError("x_factor: both yields are zero");
  return (phi_H - phi_L) / (phi_H + phi_L);
}

double photon_count(double P0_W, double T_integr_us, double wavelength_nm) {
  if (!(P0_W > 0.0)) throw ArgumentError("photon_count: P0 must be positive");
  const double energy_J = constants::planck_J_s * constants::speed_of_light_m_s / (wavelength_nm * 1e-9);
  return P0_W * T_integr_us * 1e-6 / energy_J;
}

double r_opt(const SnrBudget& b) {
  b.validate();
  const double photons = photon_count(b.P0_W, b.T_integr_us, b.wavelength_nm);
  double r = std::exp(-2.0 * b.t0_us / b.T2_us) *
             std::sqrt(b.p_coll * b.p_det * b.sigma_over_A * photons * b.mean_yield());
  if (b.ensemble) r *= std::sqrt(b.n_probes);
  return r;
}

double snr_single_shot(double r_opt_value, double X, double V, Mode mode) {
  if (!(V >= 0.0 && V <= 1.0)) throw ArgumentError("snr_single_shot: V must lie in [0, 1]");
  const double r = r_opt_value * (1.0 - V);
  return mode == Mode::off_resonant ? r * X : r;
}

double snr_single_shot(const SnrBudget& b, double V, Mode mode) {
  return snr_single_shot(r_opt(b), b.X, V, mode);
}

double averaged_snr(double R, double n_cycles) {
  if (!(n_cycles >= 1.0)) throw ArgumentError("averaged_snr: n_cycles must be >= 1");
  return R * std::sqrt(n_cycles);
}

double experiment_time(double n_cycles, double T_rep_us, double n_points) {
  if (n_cycles < 0.0 || T_rep_us < 0.0 || n_points < 0.0)
    throw ArgumentError("experiment_time: inputs must be nonnegative");
  return n_cycles * T_rep_us * 1e-6 * n_points;
}

double collection_efficiency(double coupler_eff, GapType gap) {
  if (!unit_interval(coupler_eff))
    throw ArgumentError("collection_efficiency: coupler efficiency must lie in [0, 1]");
  return gap == GapType::isotropic ? coupler_eff : 0.5 * coupler_eff;
}

double default_area_nm2(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw ArgumentError("default_area: wavelength must be positive");
  return 1.5 * wavelength_nm * 0.1 * wavelength_nm;
}

Mode parse_mode(const std::string& s) {
  if (s == "off_resonant" || s == "off-resonant") return Mode::off_resonant;
  if (s == "resonant") return Mode::resonant;
  throw ArgumentError("unknown SNR mode '" + s + "' (expected off_resonant or resonant)");
}

GapType parse_gap_type(const std::string& s) {
  if (s == "isotropic") return GapType::isotropic;
  if (s == "partial") return GapType::partial;
  throw ArgumentError("unknown gap type '" + s + "' (expected isotropic or partial)");
}

std::string to_string(Mode m) { return m == Mode::off_resonant ? "off_resonant" : "resonant"; }
std::string to_string(GapType g) { return g == GapType::isotropic ? "isotropic" : "partial"; }

}  // namespace sicyig::snr
