#pragma once

namespace sicyig::constants {

inline constexpr double pi = 3.14159265358979323846;

/// Bohr magneton over Planck constant, MHz per gauss for g = 1.
inline constexpr double bohr_MHz_per_G = 1.399625;

inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double bohr_magneton_J_per_T = 9.2740100783e-24;
inline constexpr double mu0_over_4pi = 1.00000000055e-7;  // T m / A
inline constexpr double free_electron_g = 2.00231930436256;

/// Dipolar coupling prefactor for two free electrons at 1 nm, in MHz:
/// mu0 muB^2 ge^2 / (4 pi h r^3). Evaluates to 52.04 MHz.
inline constexpr double dipolar_MHz_nm3 =
    mu0_over_4pi * bohr_magneton_J_per_T * bohr_magneton_J_per_T * free_electron_g *
    free_electron_g / planck_J_s / 1e-27 / 1e6;

inline constexpr double cm2_to_nm2 = 1e14;

}  // namespace sicyig::constants
