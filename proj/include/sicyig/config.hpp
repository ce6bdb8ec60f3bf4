#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sicyig/deer.hpp"
#include "sicyig/magnetostatics.hpp"
#include "sicyig/photonics.hpp"
#include "sicyig/snr.hpp"
#include "sicyig/spin_spectra.hpp"
#include "sicyig/swr.hpp"

namespace sicyig::config {

inline constexpr int schema_version = 1;

struct TdGrid {
  double start_us = 0.0;
  double stop_us = 10.0;
  int count = 101;
  std::vector<double> values() const;
};

struct PhcSettings {
  photonics::PhcLattice lattice;
  int n_planewaves = 441;
  int k_points_per_segment = 24;
  int n_bands = 10;
  double lambda_zpl_nm = 915.0;
  int nanobeam_max_m = 3;
};

struct FabSettings {
  std::string profile = "c30kev_zno_sio2_sic.txt";
  double dose_per_cm2 = 4.4e12;
  double aperture_diameter_nm = 20.0;
  double decimation = 0.01;
  double n_devices = 100.0;
  double window_lo_nm = 5.0;
  double window_hi_nm = 7.5;
};

struct DeerSettings {
  deer::DeerScenario scenario;
  TdGrid td;
  deer::FitBounds bounds;
  int mc_configs = 20000;
  int mc_spin_cap = 100000;
};

struct SensorConfig {
  magnetostatics::StripeGeometry stripe;
  double membrane_thickness_nm = 100.0;
  double probe_depth_nm = 6.0;
  double microwave_freq_GHz = 9.7;
  double gradient_depth_offset_nm = 6.0;
  swr::SwrModel swr;
  std::vector<spectra::SpinSystem> spin_systems;
  DeerSettings deer;
  snr::SnrBudget snr;
  PhcSettings phc;
  FabSettings fab;
  /// Directory of the file the config was loaded from; used to resolve
  /// relative paths. Not serialized.
  std::string base_dir;

  /// Hard validation; throws ConfigError.
  void validate() const;
  /// Soft consistency checks, one message per issue.
  std::vector<std::string> warnings() const;
};

SensorConfig defaults();

SensorConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const SensorConfig& c);

SensorConfig load_config(const std::string& path);
void save_config(const SensorConfig& c, const std::string& path);
std::string dump_config(const SensorConfig& c);

/// Resolves the implantation profile path: relative to the config directory
/// first, then the bundled profile directory.
std::string resolve_profile(const SensorConfig& c);

/// Location of bundled data (configs, profiles); $SICYIG_DATA overrides.
std::string data_dir();

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace sicyig::config
