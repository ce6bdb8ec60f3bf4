#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace sicyig::photonics {

// Triangular lattice of circular holes, lattice vectors a1 = (1, 0),
// a2 = (1/2, sqrt(3)/2) in units of a. Wavevectors are in units of 1/a.

struct PhcLattice {
  double a_nm = 1.0;
  double r_over_a = 0.29;
  double eps_background = 6.25;
  double eps_hole = 1.0;

  void validate() const;
  /// Hole area over unit-cell area, (2 pi / sqrt 3)(r/a)^2.
  double fill_factor() const;
};

struct KPoint {
  Eigen::Vector2d k;
  std::string label;  // empty between high-symmetry points
};

struct Segment {
  std::string name;   // "Gamma-K", "K-M", "M-Gamma"
  std::size_t first;  // inclusive index range into the k list
  std::size_t last;
};

struct KPath {
  std::vector<KPoint> points;
  std::vector<Segment> segments;
};

/// Gamma-K-M-Gamma with points_per_segment intervals per leg.
KPath k_path(std::size_t points_per_segment = 24);

/// The n_pw shortest reciprocal vectors, extended to complete the last shell
/// so the set keeps the lattice symmetry.
std::vector<Eigen::Vector2d> reciprocal_set(std::size_t n_pw);

/// Fourier coefficient of the permittivity at reciprocal vector G.
double epsilon_fourier(const PhcLattice& lat, const Eigen::Vector2d& G);

struct BandDiagram {
  KPath path;
  Eigen::MatrixXd bands;  // rows: k points, cols: bands, normalized frequency a / lambda
  std::size_t n_planewaves = 0;
};

/// TM bands with the inverse-permittivity rule. n_pw >= 169.
BandDiagram tm_bands(const PhcLattice& lat, const KPath& path, std::size_t n_pw = 441,
                     std::size_t n_bands = 10);

struct GapReport {
  std::string kind;     // "complete" or "partial"
  std::string segment;  // empty for complete gaps
  std::size_t lower_band = 0;  // 1-based index of the band below the gap
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  double center = 0.0;
  double width = 0.0;
};

/// Gaps below max_freq, either over the whole path or restricted to one named
/// segment. Openings narrower than min_width (band touchings) are dropped.
std::vector<GapReport> find_gaps(const BandDiagram& diag, const std::optional<std::string>& segment = std::nullopt,
                                 double max_freq = 0.8, double min_width = 1e-4);

struct LatticeDesign {
  double a_nm;
  double hole_diameter_nm;
  /// Whole-nm drawing values: a rounded, hole radius rounded, diameter twice that.
  double a_drawn_nm;
  double hole_diameter_drawn_nm;
};

LatticeDesign lattice_from_zpl(double lambda_zpl_nm, double omega_norm, double r_over_a);

struct NanobeamWidth {
  int m;
  double width_nm;
  bool has_center_antinode;
};

std::vector<NanobeamWidth> nanobeam_widths(double lambda_zpl_nm, int max_m);

/// Narrowest width with a central antinode that exceeds the stripe width.
std::optional<NanobeamWidth> select_nanobeam(const std::vector<NanobeamWidth>& widths,
                                             double stripe_width_nm);

}  // namespace sicyig::photonics
