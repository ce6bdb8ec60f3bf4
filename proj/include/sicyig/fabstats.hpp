#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sicyig::fabstats {

/// Vacancy depth profile sampled at points, linear in between. Depth origin is
/// the semiconductor surface; density is vacancies per ion per nm.
struct ImplantProfile {
  std::vector<double> depth_nm;
  std::vector<double> density_per_nm;
  std::optional<double> declared_vacancies_per_ion;
  std::string source;

  void validate() const;
  /// Integral of the density over the given depth interval, clipped to the support.
  double integral(double z1_nm, double z2_nm) const;
  /// Integral over the whole support: vacancies per ion.
  double total() const;
  double depth_min() const { return depth_nm.front(); }
  double depth_max() const { return depth_nm.back(); }
};

struct ApertureSpec {
  double diameter_nm = 20.0;
  double dose_per_cm2 = 4.4e12;
  double decimation = 0.01;

  void validate() const;
  double area_nm2() const;
};

/// Two-column text (depth, density). Lines starting with '#' are comments;
/// the headers `# depth_unit: nm|angstrom`, `# density_unit: per_nm|per_angstrom`
/// and `# vacancies_per_ion: <value>` are recognised.
ImplantProfile parse_profile(const std::string& path);
ImplantProfile parse_profile_text(const std::string& text, const std::string& source = "<text>");

struct Window {
  double z1_nm;
  double z2_nm;
};

/// Parses "z1:z2".
Window parse_window(const std::string& s);

/// Mean number of created centers per aperture. A window that misses the
/// profile support gives zero and a message in *warning.
double expected_count(const ImplantProfile& profile, const ApertureSpec& ap,
                      std::optional<Window> window = std::nullopt, std::string* warning = nullptr);

double poisson_pmf(double lambda, int k);

struct HistogramBin {
  int k;
  double probability;
  double expected;
  long rounded;
};

/// Expected device counts for k = 0..k_max, where k_max is the first k whose
/// cumulative probability reaches 1 - tail.
std::vector<HistogramBin> poisson_histogram(double lambda, double n_devices, double tail = 1e-3);

double depth_window_probability(const ImplantProfile& profile, double z1_nm, double z2_nm);

/// n_devices * P(k = 1; lambda) * p_window
double usable_yield(double lambda, double p_window, double n_devices);

}  // namespace sicyig::fabstats
