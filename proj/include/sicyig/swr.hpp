#pragma once

#include <string>
#include <vector>

#include "sicyig/magnetostatics.hpp"

namespace sicyig::swr {

enum class Boundary { free, pinned };

struct SwrModel {
  magnetostatics::StripeGeometry geom;
  double exchange_D_G_nm2 = 5.3e5;  // YIG, 2A/Ms
  int n_grid = 256;
  double gyromag_MHz_per_G = 2.8;
  Boundary boundary = Boundary::free;
  /// When false the internal field is uniform (B_int = B0); used for the
  /// thin-film / Kittel limit.
  bool include_demag = true;
  int max_modes = 24;

  void validate() const;
};

struct InternalFieldProfile {
  std::vector<double> z_nm;
  std::vector<double> b_int_G;
  bool unsaturated = false;  // some B_int <= 0
};

struct SwrLine {
  int mode_index = 0;
  double resonance_field_G = 0.0;
  double oscillator_strength = 0.0;
  bool edge_localized = false;
  double edge_weight = 0.0;  // fraction of |psi|^2 within W/8 of an edge
};

struct ModeSet {
  std::vector<double> freq_MHz;              // ascending
  std::vector<std::vector<double>> vectors;  // unit-norm, one per frequency
};

struct DispersionPoint {
  double b0_G;
  int mode;
  double freq_GHz;
};

struct OverlapPair {
  double swr_field_G;
  double epr_field_G;
  double distance_G;  // |separation| minus summed half-widths
};

struct OverlapReport {
  std::vector<OverlapPair> pairs;
  double min_distance_G = 0.0;
  bool pass = true;
};

struct EprLine {
  double field_G;
  double linewidth_G;
};

/// Grid of z nodes across the width used by the discretized operator.
std::vector<double> grid_nodes(const SwrModel& model);

InternalFieldProfile internal_field_profile(const SwrModel& model, double b0_G);
InternalFieldProfile internal_field_profile(const magnetostatics::StripeGeometry& geom,
                                            double b0_G, int n_grid = 256);

/// Lowest eigenfrequencies of -gamma D d^2/dz^2 + gamma sqrt(B_int (B_int + Bsat)).
ModeSet modes(const SwrModel& model, double b0_G, int n_modes, bool with_vectors);

double oscillator_strength(const SwrModel& model, const std::vector<double>& psi);
double edge_weight(const SwrModel& model, const std::vector<double>& psi);

/// Resonance lines at the drive frequency over a uniform B0 grid.
std::vector<SwrLine> swr_lines(const SwrModel& model, double drive_freq_GHz, double b0_lo_G,
                               double b0_hi_G, double b0_step_G = 1.0);

std::vector<DispersionPoint> dispersion_map(const SwrModel& model, double b0_lo_G,
                                            double b0_hi_G, double b0_step_G, int n_modes);

OverlapReport overlap_check(const std::vector<SwrLine>& swr, const std::vector<EprLine>& epr,
                            double swr_linewidth_G = 1.0);

Boundary parse_boundary(const std::string& name);
std::string to_string(Boundary b);

}  // namespace sicyig::swr
