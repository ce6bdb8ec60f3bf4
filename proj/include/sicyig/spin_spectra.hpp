#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sicyig/magnetostatics.hpp"

namespace sicyig::spectra {

/// ZYZ Euler angles (radians) rotating a principal frame into the molecular frame.
struct EulerAngles {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  Eigen::Matrix3d matrix() const;
};

enum class Lineshape { gaussian, lorentzian };

struct HyperfineCoupling {
  double nuclear_spin_I = 0.5;
  Vec3 A_MHz = Vec3::Zero();
  EulerAngles frame;
};

struct SpinSystem {
  std::string label = "spin";
  double spin_S = 0.5;
  Vec3 g = Vec3::Constant(2.0);
  EulerAngles g_frame;
  double D_MHz = 0.0;
  double E_MHz = 0.0;
  /// Gaussian spread of D (standard deviation); zero means a single D.
  double D_sigma_MHz = 0.0;
  int D_samples = 9;
  std::vector<HyperfineCoupling> hyperfine;
  double linewidth_G = 1.0;  // full width at half maximum
  Lineshape lineshape = Lineshape::gaussian;

  void validate() const;
  int dimension() const;
  double g_iso() const { return g.mean(); }
};

struct SpectrumLine {
  double resonance_field_G = 0.0;
  double amplitude = 0.0;
  int level_lo = 0;
  int level_hi = 0;
  Vec3 orientation = Vec3::UnitZ();
};

struct Spectrum {
  std::vector<double> field_G;
  std::vector<double> intensity;
  std::vector<std::string> systems;
};

struct SweepWindow {
  double lo_G = 1.0;
  double hi_G = 15000.0;
  double step_G = 1.0;
};

/// Literature-typical parameter sets.
SpinSystem v2_center();
SpinSystem nitroxide();
SpinSystem gadolinium();
SpinSystem trityl();

/// Spin Hamiltonian in MHz for a field vector (G) given in the molecular frame.
Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, const Vec3& field_G);

/// Transverse transition strength for levels i, j of eigenvectors V at field
/// direction n: mean over two orthogonal microwave directions of |<i|S_perp|j>|^2.
double transition_moment(const SpinSystem& sys, const Eigen::MatrixXcd& vectors, int i, int j,
                         const Vec3& direction);

/// All resonance fields for a field swept along `orientation` at fixed frequency.
std::vector<SpectrumLine> resonance_fields(const SpinSystem& sys, double freq_GHz,
                                           const Vec3& orientation, const SweepWindow& window = {});

/// Same with the zero-field splitting overridden (used for D distributions).
std::vector<SpectrumLine> resonance_fields_with_D(const SpinSystem& sys, double D_MHz,
                                                  double freq_GHz, const Vec3& orientation,
                                                  const SweepWindow& window);

/// Deterministic spiral over the upper hemisphere, n unit vectors.
std::vector<Vec3> hemisphere_grid(std::size_t n);

/// Lines convolved with the system lineshape on the field grid, unnormalized.
std::vector<double> render_lines(const SpinSystem& sys, const std::vector<SpectrumLine>& lines,
                                 const std::vector<double>& grid);

Spectrum powder_spectrum(const SpinSystem& sys, double freq_GHz, const std::vector<double>& grid,
                         std::size_t n_orient);

/// Single-orientation spectrum normalized to unit maximum.
Spectrum oriented_spectrum(const SpinSystem& sys, double freq_GHz, const Vec3& orientation,
                           const std::vector<double>& grid);

/// Lines of a spin sitting in the stripe field: the swept external field is
/// lower by the local dipolar offset.
std::vector<SpectrumLine> gradient_shifted_lines(const SpinSystem& sys, double freq_GHz,
                                                 const Vec3& orientation,
                                                 const magnetostatics::EffectiveShift& shift);
std::vector<SpectrumLine> shift_lines(std::vector<SpectrumLine> lines,
                                      const magnetostatics::EffectiveShift& shift);

/// Homogeneous linewidth (G) from a coherence time in microseconds.
double linewidth_from_T2(double T2_us, double g);

/// Depth resolution in angstrom for a linewidth (G) and gradient (G/nm).
double depth_resolution(double linewidth_G, double gradient_G_per_nm);

/// Integral of the spectrum inside [lo, hi] over its total integral.
double spectral_fraction(const Spectrum& spec, double lo_G, double hi_G);

/// Maps a pump frequency window (GHz), applied while the spectrometer sits at
/// `observe_field_G` with carrier `mw_freq_GHz`, onto the window of resonance
/// fields (at the carrier) of spins with factor g that it excites.
std::pair<double, double> frequency_window_to_field(double f_lo_GHz, double f_hi_GHz,
                                                    double mw_freq_GHz, double observe_field_G,
                                                    double g);

Lineshape parse_lineshape(const std::string& name);
std::string to_string(Lineshape l);

}  // namespace sicyig::spectra
