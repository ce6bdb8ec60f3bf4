#pragma once

#include <optional>
#include <string>

namespace sicyig::snr {

enum class Mode { off_resonant, resonant };
enum class GapType { isotropic, partial };

struct SnrBudget {
  double t0_us = 6.25;
  double T2_us = 12.5;
  double p_coll = 0.5;
  double p_det = 0.4;
  double sigma_over_A = 1.0;
  double P0_W = 20e-6;
  double wavelength_nm = 780.0;
  double T_integr_us = 1.0;
  double phi_H = 1.0;
  double phi_L = 1.0;
  double X = 0.02;
  double n_cycles = 5000.0;
  double T_rep_us = 200.0;
  double n_probes = 1.0;
  bool ensemble = false;

  void validate() const;
  /// (phi_H + phi_L) / 2
  double mean_yield() const;
};

/// (phi_H - phi_L) / (phi_H + phi_L)
double x_factor(double phi_H, double phi_L);

/// Photons emitted by the excitation power during the integration window.
double photon_count(double P0_W, double T_integr_us, double wavelength_nm);

/// Shot-noise limited single-shot SNR for full contrast. Multiplied by
/// sqrt(n_probes) when the ensemble flag is set.
double r_opt(const SnrBudget& b);

double snr_single_shot(const SnrBudget& b, double V, Mode mode);
double snr_single_shot(double r_opt_value, double X, double V, Mode mode);

double averaged_snr(double R, double n_cycles);

/// Seconds spent for n_points spectrum points of n_cycles repetitions each.
double experiment_time(double n_cycles, double T_rep_us, double n_points);

double collection_efficiency(double coupler_eff, GapType gap);

/// Optical cross-section area scale (3 lambda / 2)(lambda / 10), nm^2.
double default_area_nm2(double wavelength_nm);

Mode parse_mode(const std::string& s);
GapType parse_gap_type(const std::string& s);
std::string to_string(Mode m);
std::string to_string(GapType g);

}  // namespace sicyig::snr
