#include "sicyig/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/numeric.hpp"

namespace sicyig::config {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<double> TdGrid::values() const {
  if (count < 1) throw ConfigError("deer.td_count must be >= 1");
  if (count == 1) return {start_us};
  return numeric::linspace(start_us, stop_us, static_cast<std::size_t>(count));
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

const std::vector<std::string> kSuffixes = {
    "_G_nm2", "_MHz_per_G", "_per_nm2", "_per_cm2", "_unitless", "_count", "_prob", "_hbar",
    "_deg", "_GHz", "_MHz", "_nm", "_um", "_us", "_G", "_W", "_s"};

std::string strip_suffix(const std::string& key) {
  for (const auto& s : kSuffixes)
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0)
      return key.substr(0, key.size() - s.size());
  return key;
}

// Reads one JSON object, tracking which keys were consumed so leftovers can be
// reported as unknown keys or wrong unit suffixes.
class Table {
 public:
  Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected a table");
  }

  double num(const std::string& key, double fallback) {
    known_.push_back(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + "expected a number");
    return v.get<double>();
  }

  int count(const std::string& key, int fallback) {
    known_.push_back(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + "expected an integer");
    return v.get<int>();
  }

  bool flag(const std::string& key, bool fallback) {
    known_.push_back(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    known_.push_back(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + "expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    known_.push_back(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); }))
      throw ConfigError(where(key) + "expected an array of three numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  const json* sub(const std::string& key) {
    known_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (std::find(known_.begin(), known_.end(), key) != known_.end()) continue;
      const std::string base = strip_suffix(key);
      for (const auto& k : known_)
        if (base != key && strip_suffix(k) == base && k != base)
          throw ConfigError("unit-suffix mismatch for '" + child(key) + "': expected '" + child(k) + "'");
      std::string nearest;
      std::size_t best = std::string::npos;
      for (const auto& k : known_) {
        const std::size_t d = edit_distance(key, k);
        if (d < best) {
          best = d;
          nearest = k;
        }
      }
      throw ConfigError("unknown key '" + child(key) + "'" +
                        (nearest.empty() ? "" : "; nearest valid key is '" + child(nearest) + "'"));
    }
  }

 private:
  std::string where(const std::string& key = "") const {
    return "config " + (key.empty() ? (path_.empty() ? std::string("root") : path_) : child(key)) + ": ";
  }

  const json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

constexpr double kDeg = constants::pi / 180.0;

Vec3 euler_deg(const spectra::EulerAngles& e) { return {e.alpha / kDeg, e.beta / kDeg, e.gamma / kDeg}; }
spectra::EulerAngles euler_from_deg(const Vec3& v) { return {v.x() * kDeg, v.y() * kDeg, v.z() * kDeg}; }

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json count_json(double v) {
  if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  return v;
}

spectra::SpinSystem read_spin(const json& j, const std::string& path) {
  Table t(j, path);
  spectra::SpinSystem s;
  s.label = t.text("label", s.label);
  s.spin_S = t.num("spin_S_hbar", s.spin_S);
  s.g = t.vec3("g_unitless", s.g);
  s.g_frame = euler_from_deg(t.vec3("g_frame_deg", euler_deg(s.g_frame)));
  s.D_MHz = t.num("D_MHz", s.D_MHz);
  s.E_MHz = t.num("E_MHz", s.E_MHz);
  s.D_sigma_MHz = t.num("D_sigma_MHz", s.D_sigma_MHz);
  s.D_samples = t.count("D_samples_count", s.D_samples);
  s.linewidth_G = t.num("linewidth_G", s.linewidth_G);
  try {
    s.lineshape = spectra::parse_lineshape(t.text("lineshape", spectra::to_string(s.lineshape)));
  } catch (const ArgumentError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (const json* hf = t.sub("hyperfine")) {
    if (!hf->is_array()) throw ConfigError("config " + t.child("hyperfine") + ": expected an array");
    for (std::size_t i = 0; i < hf->size(); ++i) {
      Table h((*hf)[i], t.child("hyperfine") + "[" + std::to_string(i) + "]");
      spectra::HyperfineCoupling c;
      c.nuclear_spin_I = h.num("nuclear_spin_I_hbar", c.nuclear_spin_I);
      c.A_MHz = h.vec3("A_MHz", c.A_MHz);
      c.frame = euler_from_deg(h.vec3("frame_deg", euler_deg(c.frame)));
      h.finish();
      s.hyperfine.push_back(c);
    }
  }
  t.finish();
  return s;
}

json write_spin(const spectra::SpinSystem& s) {
  json hf = json::array();
  for (const auto& c : s.hyperfine)
    hf.push_back({{"nuclear_spin_I_hbar", c.nuclear_spin_I},
                  {"A_MHz", vec_json(c.A_MHz)},
                  {"frame_deg", vec_json(euler_deg(c.frame))}});
  return {{"label", s.label},
          {"spin_S_hbar", s.spin_S},
          {"g_unitless", vec_json(s.g)},
          {"g_frame_deg", vec_json(euler_deg(s.g_frame))},
          {"D_MHz", s.D_MHz},
          {"E_MHz", s.E_MHz},
          {"D_sigma_MHz", s.D_sigma_MHz},
          {"D_samples_count", s.D_samples},
          {"linewidth_G", s.linewidth_G},
          {"lineshape", spectra::to_string(s.lineshape)},
          {"hyperfine", hf}};
}

template <class F>
void as_config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

}  // namespace

SensorConfig defaults() {
  SensorConfig c;
  c.spin_systems = {spectra::v2_center(), spectra::nitroxide(), spectra::gadolinium(), spectra::trityl()};
  c.deer.scenario.td_us = c.deer.td.values();
  return c;
}

void SensorConfig::validate() const {
  as_config_error([&] {
    stripe.validate();
    swr.validate();
    for (const auto& s : spin_systems) s.validate();
    deer.scenario.validate();
    snr.validate();
    phc.lattice.validate();
  });
  if (!(membrane_thickness_nm > 0.0)) throw ConfigError("membrane_thickness_nm must be positive");
  if (!(probe_depth_nm >= 0.0)) throw ConfigError("probe_depth_nm must be >= 0");
  if (!(probe_depth_nm < membrane_thickness_nm))
    throw ConfigError("probe_depth_nm (" + std::to_string(probe_depth_nm) +
                      ") must be smaller than membrane_thickness_nm (" + std::to_string(membrane_thickness_nm) + ")");
  if (!(microwave_freq_GHz > 0.0)) throw ConfigError("microwave_freq_GHz must be positive");
  if (spin_systems.empty()) throw ConfigError("spin_systems must not be empty");
  if (deer.td.count < 1) throw ConfigError("deer.td_count must be >= 1");
  if (deer.mc_configs < 100) throw ConfigError("deer.mc_configs_count must be >= 100");
  if (phc.n_planewaves < 169) throw ConfigError("phc.n_planewaves_count must be >= 169");
  if (phc.k_points_per_segment < 1) throw ConfigError("phc.k_points_per_segment_count must be >= 1");
  if (phc.n_bands < 1) throw ConfigError("phc.n_bands_count must be >= 1");
  if (phc.nanobeam_max_m < 1) throw ConfigError("phc.nanobeam_max_m_count must be >= 1");
  if (!(fab.dose_per_cm2 > 0.0) || !(fab.aperture_diameter_nm > 0.0))
    throw ConfigError("fab dose and aperture diameter must be positive");
  if (!(fab.decimation > 0.0 && fab.decimation <= 1.0)) throw ConfigError("fab.decimation_unitless must lie in (0, 1]");
  if (!(fab.window_hi_nm >= fab.window_lo_nm)) throw ConfigError("fab window must satisfy lo <= hi");
}

std::vector<std::string> SensorConfig::warnings() const {
  std::vector<std::string> out;
  const double x_opt = magnetostatics::find_xopt(stripe).x_opt_nm;
  const double ideal = x_opt - stripe.thickness_nm / 2.0;
  if (std::abs(membrane_thickness_nm - ideal) > 20.0) {
    std::ostringstream msg;
    msg << "membrane thickness " << membrane_thickness_nm << " nm differs from x_opt - T/2 = " << ideal
        << " nm by more than 20 nm";
    out.push_back(msg.str());
  }
  if (!stripe.long_stripe()) out.emplace_back("stripe length below 10 widths; infinite-length field model is approximate");
  return out;
}

SensorConfig from_json(const json& j) {
  Table root(j, "");
  const int version = root.count("schema_version", -1);
  if (version == -1) throw ConfigError("config: missing schema_version");
  if (version != schema_version)
    throw ConfigError("config: unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(schema_version) + ")");
  SensorConfig c = defaults();

  if (const json* s = root.sub("stripe")) {
    Table t(*s, "stripe");
    auto& g = c.stripe;
    g.width_nm = t.num("width_nm", g.width_nm);
    g.thickness_nm = t.num("thickness_nm", g.thickness_nm);
    g.length_um = t.num("length_um", g.length_um);
    g.b_sat_G = t.num("b_sat_G", g.b_sat_G);
    t.finish();
  }
  c.membrane_thickness_nm = root.num("membrane_thickness_nm", c.membrane_thickness_nm);
  c.probe_depth_nm = root.num("probe_depth_nm", c.probe_depth_nm);
  c.microwave_freq_GHz = root.num("microwave_freq_GHz", c.microwave_freq_GHz);
  c.gradient_depth_offset_nm = root.num("gradient_depth_offset_nm", c.gradient_depth_offset_nm);

  if (const json* s = root.sub("swr")) {
    Table t(*s, "swr");
    auto& m = c.swr;
    m.exchange_D_G_nm2 = t.num("exchange_D_G_nm2", m.exchange_D_G_nm2);
    m.n_grid = t.count("n_grid_count", m.n_grid);
    m.gyromag_MHz_per_G = t.num("gyromag_MHz_per_G", m.gyromag_MHz_per_G);
    as_config_error([&] { m.boundary = swr::parse_boundary(t.text("boundary", swr::to_string(m.boundary))); });
    m.include_demag = t.flag("include_demag", m.include_demag);
    m.max_modes = t.count("max_modes_count", m.max_modes);
    t.finish();
  }
  c.swr.geom = c.stripe;

  if (const json* s = root.sub("spin_systems")) {
    if (!s->is_array()) throw ConfigError("config spin_systems: expected an array");
    c.spin_systems.clear();
    for (std::size_t i = 0; i < s->size(); ++i)
      c.spin_systems.push_back(read_spin((*s)[i], "spin_systems[" + std::to_string(i) + "]"));
  }

  if (const json* s = root.sub("deer")) {
    Table t(*s, "deer");
    auto& d = c.deer;
    auto& sc = d.scenario;
    sc.dx_nm = t.num("dx_nm", sc.dx_nm);
    sc.C2D_per_nm2 = t.num("C2D_per_nm2", sc.C2D_per_nm2);
    sc.pB = t.num("pB_prob", sc.pB);
    sc.b0_direction = t.vec3("b0_direction_unitless", sc.b0_direction);
    sc.g_probe = t.num("g_probe_unitless", sc.g_probe);
    sc.g_target = t.num("g_target_unitless", sc.g_target);
    sc.t0_us = t.num("t0_us", sc.t0_us);
    d.td.start_us = t.num("td_start_us", d.td.start_us);
    d.td.stop_us = t.num("td_stop_us", d.td.stop_us);
    d.td.count = t.count("td_count", d.td.count);
    d.bounds.dx_lo_nm = t.num("fit_dx_lo_nm", d.bounds.dx_lo_nm);
    d.bounds.dx_hi_nm = t.num("fit_dx_hi_nm", d.bounds.dx_hi_nm);
    d.bounds.C2D_lo_per_nm2 = t.num("fit_C2D_lo_per_nm2", d.bounds.C2D_lo_per_nm2);
    d.bounds.C2D_hi_per_nm2 = t.num("fit_C2D_hi_per_nm2", d.bounds.C2D_hi_per_nm2);
    d.mc_configs = t.count("mc_configs_count", d.mc_configs);
    d.mc_spin_cap = t.count("mc_spin_cap_count", d.mc_spin_cap);
    t.finish();
  }
  c.deer.scenario.td_us = c.deer.td.values();

  if (const json* s = root.sub("snr")) {
    Table t(*s, "snr");
    auto& b = c.snr;
    b.t0_us = t.num("t0_us", b.t0_us);
    b.T2_us = t.num("T2_us", b.T2_us);
    b.p_coll = t.num("p_coll_prob", b.p_coll);
    b.p_det = t.num("p_det_prob", b.p_det);
    b.sigma_over_A = t.num("sigma_over_A_unitless", b.sigma_over_A);
    b.P0_W = t.num("P0_W", b.P0_W);
    b.wavelength_nm = t.num("wavelength_nm", b.wavelength_nm);
    b.T_integr_us = t.num("T_integr_us", b.T_integr_us);
    b.phi_H = t.num("phi_H_prob", b.phi_H);
    b.phi_L = t.num("phi_L_prob", b.phi_L);
    b.X = t.num("X_unitless", b.X);
    b.n_cycles = t.num("n_cycles_count", b.n_cycles);
    b.T_rep_us = t.num("T_rep_us", b.T_rep_us);
    b.n_probes = t.num("n_probes_count", b.n_probes);
    b.ensemble = t.flag("ensemble", b.ensemble);
    t.finish();
  }

  if (const json* s = root.sub("phc")) {
    Table t(*s, "phc");
    auto& p = c.phc;
    p.lattice.a_nm = t.num("a_nm", p.lattice.a_nm);
    p.lattice.r_over_a = t.num("r_over_a_unitless", p.lattice.r_over_a);
    p.lattice.eps_background = t.num("eps_background_unitless", p.lattice.eps_background);
    p.lattice.eps_hole = t.num("eps_hole_unitless", p.lattice.eps_hole);
    p.n_planewaves = t.count("n_planewaves_count", p.n_planewaves);
    p.k_points_per_segment = t.count("k_points_per_segment_count", p.k_points_per_segment);
    p.n_bands = t.count("n_bands_count", p.n_bands);
    p.lambda_zpl_nm = t.num("lambda_zpl_nm", p.lambda_zpl_nm);
    p.nanobeam_max_m = t.count("nanobeam_max_m_count", p.nanobeam_max_m);
    t.finish();
  }

  if (const json* s = root.sub("fab")) {
    Table t(*s, "fab");
    auto& f = c.fab;
    f.profile = t.text("profile", f.profile);
    f.dose_per_cm2 = t.num("dose_per_cm2", f.dose_per_cm2);
    f.aperture_diameter_nm = t.num("aperture_diameter_nm", f.aperture_diameter_nm);
    f.decimation = t.num("decimation_unitless", f.decimation);
    f.n_devices = t.num("n_devices_count", f.n_devices);
    f.window_lo_nm = t.num("window_lo_nm", f.window_lo_nm);
    f.window_hi_nm = t.num("window_hi_nm", f.window_hi_nm);
    t.finish();
  }
  root.finish();
  c.validate();
  return c;
}

json to_json(const SensorConfig& c) {
  json spins = json::array();
  for (const auto& s : c.spin_systems) spins.push_back(write_spin(s));
  const auto& d = c.deer;
  const auto& b = c.snr;
  const auto& p = c.phc;
  const auto& f = c.fab;
  return {
      {"schema_version", schema_version},
      {"stripe",
       {{"width_nm", c.stripe.width_nm},
        {"thickness_nm", c.stripe.thickness_nm},
        {"length_um", c.stripe.length_um},
        {"b_sat_G", c.stripe.b_sat_G}}},
      {"membrane_thickness_nm", c.membrane_thickness_nm},
      {"probe_depth_nm", c.probe_depth_nm},
      {"microwave_freq_GHz", c.microwave_freq_GHz},
      {"gradient_depth_offset_nm", c.gradient_depth_offset_nm},
      {"swr",
       {{"exchange_D_G_nm2", c.swr.exchange_D_G_nm2},
        {"n_grid_count", c.swr.n_grid},
        {"gyromag_MHz_per_G", c.swr.gyromag_MHz_per_G},
        {"boundary", swr::to_string(c.swr.boundary)},
        {"include_demag", c.swr.include_demag},
        {"max_modes_count", c.swr.max_modes}}},
      {"spin_systems", spins},
      {"deer",
       {{"dx_nm", d.scenario.dx_nm},
        {"C2D_per_nm2", d.scenario.C2D_per_nm2},
        {"pB_prob", d.scenario.pB},
        {"b0_direction_unitless", vec_json(d.scenario.b0_direction)},
        {"g_probe_unitless", d.scenario.g_probe},
        {"g_target_unitless", d.scenario.g_target},
        {"t0_us", d.scenario.t0_us},
        {"td_start_us", d.td.start_us},
        {"td_stop_us", d.td.stop_us},
        {"td_count", d.td.count},
        {"fit_dx_lo_nm", d.bounds.dx_lo_nm},
        {"fit_dx_hi_nm", d.bounds.dx_hi_nm},
        {"fit_C2D_lo_per_nm2", d.bounds.C2D_lo_per_nm2},
        {"fit_C2D_hi_per_nm2", d.bounds.C2D_hi_per_nm2},
        {"mc_configs_count", d.mc_configs},
        {"mc_spin_cap_count", d.mc_spin_cap}}},
      {"snr",
       {{"t0_us", b.t0_us},
        {"T2_us", b.T2_us},
        {"p_coll_prob", b.p_coll},
        {"p_det_prob", b.p_det},
        {"sigma_over_A_unitless", b.sigma_over_A},
        {"P0_W", b.P0_W},
        {"wavelength_nm", b.wavelength_nm},
        {"T_integr_us", b.T_integr_us},
        {"phi_H_prob", b.phi_H},
        {"phi_L_prob", b.phi_L},
        {"X_unitless", b.X},
        {"n_cycles_count", count_json(b.n_cycles)},
        {"T_rep_us", b.T_rep_us},
        {"n_probes_count", count_json(b.n_probes)},
        {"ensemble", b.ensemble}}},
      {"phc",
       {{"a_nm", p.lattice.a_nm},
        {"r_over_a_unitless", p.lattice.r_over_a},
        {"eps_background_unitless", p.lattice.eps_background},
        {"eps_hole_unitless", p.lattice.eps_hole},
        {"n_planewaves_count", p.n_planewaves},
        {"k_points_per_segment_count", p.k_points_per_segment},
        {"n_bands_count", p.n_bands},
        {"lambda_zpl_nm", p.lambda_zpl_nm},
        {"nanobeam_max_m_count", p.nanobeam_max_m}}},
      {"fab",
       {{"profile", f.profile},
        {"dose_per_cm2", f.dose_per_cm2},
        {"aperture_diameter_nm", f.aperture_diameter_nm},
        {"decimation_unitless", f.decimation},
        {"n_devices_count", count_json(f.n_devices)},
        {"window_lo_nm", f.window_lo_nm},
        {"window_hi_nm", f.window_hi_nm}}},
  };
}

std::string dump_config(const SensorConfig& c) { return to_json(c).dump(2) + "\n"; }

SensorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  SensorConfig c = from_json(j);
  c.base_dir = fs::absolute(fs::path(path)).parent_path().string();
  return c;
}

void save_config(const SensorConfig& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config " + path);
  out << dump_config(c);
  if (!out) throw IoError("failed writing config " + path);
}

std::string data_dir() {
  if (const char* env = std::getenv("SICYIG_DATA"); env && *env) return env;
#ifdef SICYIG_DATA_DIR
  return SICYIG_DATA_DIR;
#else
  return "data";
#endif
}

std::string resolve_profile(const SensorConfig& c) {
  const fs::path p(c.fab.profile);
  if (p.is_absolute()) return p.string();
  if (!c.base_dir.empty() && fs::exists(fs::path(c.base_dir) / p)) return (fs::path(c.base_dir) / p).string();
  if (fs::exists(p)) return p.string();
  return (fs::path(data_dir()) / "profiles" / p).string();
}

}  // namespace sicyig::config
