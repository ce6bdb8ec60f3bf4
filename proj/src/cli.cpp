#include "sicyig/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sicyig/config.hpp"
#include "sicyig/constants.hpp"
#include "sicyig/deer.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/fabstats.hpp"
#include "sicyig/magnetostatics.hpp"
#include "sicyig/parallel.hpp"
#include "sicyig/photonics.hpp"
#include "sicyig/report.hpp"
#include "sicyig/reproduce.hpp"
#include "sicyig/snr.hpp"
#include "sicyig/spin_spectra.hpp"
#include "sicyig/swr.hpp"

#ifndef SICYIG_VERSION
#define SICYIG_VERSION "0.0.0"
#endif

namespace sicyig::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using report::Table;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string format;
  unsigned threads = 0;
};

struct Context {
  Globals g;
  config::SensorConfig cfg;
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> outputs;

  std::string format_or(const std::string& fallback) const { return g.format.empty() ? fallback : g.format; }

  void emit(const std::string& name, const std::string& text) {
    if (g.out_dir.empty()) {
      out << text;
      return;
    }
    const std::string path = (fs::path(g.out_dir) / name).string();
    report::write_file(path, text);
    outputs.push_back(path);
  }

  void emit_table(const std::string& stem, const Table& t) {
    if (format_or("csv") == "json")
      emit(stem + ".json", report::to_json_text(t.to_json()));
    else
      emit(stem + ".csv", report::to_csv(t));
  }

  void emit_json(const std::string& stem, const json& j) {
    if (format_or("json") != "json") throw ArgumentError("this subcommand writes JSON only; use --format json");
    emit(stem + ".json", report::to_json_text(j));
  }
};

config::SensorConfig load(const Globals& g, std::ostream& err) {
  if (g.config_path.empty()) return config::defaults();
  std::string path = g.config_path;
  if (path == "paper-defaults") path = config::data_dir() + "/configs/paper-defaults.json";
  config::SensorConfig c = config::load_config(path);
  for (const auto& w : c.warnings()) err << "warning: " << w << "\n";
  return c;
}

// ---------------------------------------------------------------- field-map

struct FieldMapArgs {
  bool xopt = false;
  std::optional<double> x_lo, x_hi, z_lo, z_hi;
  double x_step = 10.0, z_step = 50.0;
};

void cmd_field_map(Context& ctx, const FieldMapArgs& a) {
  namespace ms = magnetostatics;
  const auto& geom = ctx.cfg.stripe;
  if (a.xopt) {
    const auto o = ms::find_xopt(geom);
    ctx.emit_json("xopt", {{"x_opt_nm", o.x_opt_nm}, {"g_max_G_per_nm", o.g_max_G_per_nm}});
    return;
  }
  const double x_lo = a.x_lo.value_or(geom.thickness_nm / 2.0 + 10.0);
  const double x_hi = a.x_hi.value_or(geom.thickness_nm / 2.0 + 300.0);
  const double z_lo = a.z_lo.value_or(-geom.width_nm);
  const double z_hi = a.z_hi.value_or(geom.width_nm);
  if (!(a.x_step > 0.0) || !(a.z_step > 0.0)) throw ArgumentError("field-map: steps must be positive");
  if (x_hi < x_lo || z_hi < z_lo) throw ArgumentError("field-map: empty range");
  if (x_lo <= geom.thickness_nm / 2.0 + 0.1) throw ArgumentError("field-map: x range must stay above the stripe");
  Table t;
  t.columns = {"x_nm", "z_nm", "Bx_G", "By_G", "Bz_G", "dBz_dx_G_per_nm"};
  const auto nx = static_cast<long>(std::floor((x_hi - x_lo) / a.x_step + 1e-9)) + 1;
  const auto nz = static_cast<long>(std::floor((z_hi - z_lo) / a.z_step + 1e-9)) + 1;
  for (long i = 0; i < nx; ++i)
    for (long k = 0; k < nz; ++k) {
      const double x = x_lo + static_cast<double>(i) * a.x_step;
      const double z = z_lo + static_cast<double>(k) * a.z_step;
      const Vec3 b = ms::stripe_field(geom, Vec3(x, 0.0, z));
      t.add({x, z, b.x(), b.y(), b.z(), ms::bz_gradient_x(geom, x, z)});
    }
  ctx.emit_table("field_map", t);
}

// ---------------------------------------------------------------- swr

struct SwrArgs {
  std::optional<double> drive_GHz;
  double b0_lo = 1000.0, b0_hi = 6000.0, b0_step = 1.0;
  bool dispersion = false;
  int modes = 8;
};

void cmd_swr(Context& ctx, const SwrArgs& a) {
  swr::SwrModel model = ctx.cfg.swr;
  model.geom = ctx.cfg.stripe;
  if (a.dispersion) {
    Table t;
    t.columns = {"B0_G", "mode_index", "freq_GHz"};
    for (const auto& p : swr::dispersion_map(model, a.b0_lo, a.b0_hi, a.b0_step, a.modes))
      t.add({p.b0_G, static_cast<long long>(p.mode), p.freq_GHz});
    ctx.emit_table("swr_dispersion", t);
    return;
  }
  Table t;
  t.columns = {"resonance_field_G", "strength_unitless", "edge_localized"};
  for (const auto& l : swr::swr_lines(model, a.drive_GHz.value_or(ctx.cfg.microwave_freq_GHz), a.b0_lo, a.b0_hi, a.b0_step))
    t.add({l.resonance_field_G, l.oscillator_strength, l.edge_localized});
  ctx.emit_table("swr_lines", t);
}

// ---------------------------------------------------------------- epr-spectrum

struct EprArgs {
  std::vector<std::string> systems;
  bool gradient = false;
  bool oriented = false;
  int orientations = 400;
  std::optional<double> b_lo, b_hi;
  double b_step = 0.5;
};

void cmd_epr(Context& ctx, const EprArgs& a) {
  namespace sp = spectra;
  const auto& cfg = ctx.cfg;
  const double f = cfg.microwave_freq_GHz;
  const double center = f * 1e3 / (constants::free_electron_g * constants::bohr_MHz_per_G);
  double lo = a.b_lo.value_or(center - 2000.0);
  double hi = a.b_hi.value_or(center + 2000.0);
  if (!(a.b_step > 0.0) || !(hi > lo)) throw ArgumentError("epr-spectrum: invalid field grid");

  double x_opt = 0.0;
  if (a.gradient) x_opt = magnetostatics::find_xopt(cfg.stripe).x_opt_nm;
  std::vector<double> grid;
  for (double b = lo; b <= hi + 1e-9; b += a.b_step) grid.push_back(b);

  json systems = json::array();
  Table combined;
  combined.columns = {"system", "B_G", "intensity_unitless"};
  for (const auto& s : cfg.spin_systems) {
    if (!a.systems.empty() && std::find(a.systems.begin(), a.systems.end(), s.label) == a.systems.end()) continue;
    std::vector<sp::SpectrumLine> lines;
    std::vector<double> intensity;
    if (a.gradient) {
      // Oriented along the stripe field direction; the probe sits deeper than the targets.
      const double x = s.label == "V2" ? x_opt - cfg.gradient_depth_offset_nm : x_opt;
      lines = sp::resonance_fields(s, f, Vec3::UnitZ());
      for (auto& l : lines) {
        const auto sh = magnetostatics::effective_zeeman_shift(cfg.stripe, Vec3(x, 0.0, 0.0), l.resonance_field_G);
        l.resonance_field_G -= sh.total_G;
      }
      intensity = sp::render_lines(s, lines, grid);
    } else if (a.oriented || s.label == "V2") {
      lines = sp::resonance_fields(s, f, Vec3::UnitZ());
      intensity = sp::render_lines(s, lines, grid);
    } else {
      const sp::Spectrum spec = sp::powder_spectrum(s, f, grid, static_cast<std::size_t>(a.orientations));
      intensity = spec.intensity;
      lines = sp::resonance_fields(s, f, Vec3::UnitZ());
    }
    double peak = 0.0;
    for (double v : intensity) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
      for (double& v : intensity) v /= peak;

    json jl = json::array();
    for (const auto& l : lines)
      jl.push_back({{"resonance_field_G", l.resonance_field_G}, {"amplitude_unitless", l.amplitude},
                    {"levels_index", {l.level_lo, l.level_hi}}});
    systems.push_back({{"label", s.label}, {"lines_along_z", jl}, {"linewidth_G", s.linewidth_G}});

    Table t;
    t.columns = {"B_G", "intensity_unitless"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.add({grid[i], intensity[i]});
      combined.add({s.label, grid[i], intensity[i]});
    }
    if (!ctx.g.out_dir.empty() && ctx.format_or("csv") == "csv") ctx.emit("spectrum_" + s.label + ".csv", report::to_csv(t));
  }
  if (systems.empty()) throw ArgumentError("epr-spectrum: no spin system matches the selection");
  const json lines_doc = {{"microwave_freq_GHz", f}, {"gradient", a.gradient}, {"systems", systems}};
  if (ctx.format_or("csv") == "json") {
    ctx.emit("lines.json", report::to_json_text(lines_doc));
  } else if (ctx.g.out_dir.empty()) {
    ctx.emit("spectrum.csv", report::to_csv(combined));
  } else {
    ctx.emit("lines.json", report::to_json_text(lines_doc));
  }
}

// ---------------------------------------------------------------- deer

struct DeerSimArgs {
  std::optional<double> dx, c2d, pb;
  bool shell_product = false;
};

void cmd_deer_sim(Context& ctx, const DeerSimArgs& a) {
  deer::DeerScenario sc = ctx.cfg.deer.scenario;
  if (a.dx) sc.dx_nm = *a.dx;
  if (a.c2d) sc.C2D_per_nm2 = *a.c2d;
  if (a.pb) sc.pB = *a.pb;
  sc.validate();
  std::vector<double> v(sc.td_us.size());
  parallel::parallel_for(v.size(), [&](std::size_t i) {
    v[i] = a.shell_product ? deer::plane_signal_shell_product(sc, sc.td_us[i]) : deer::plane_signal(sc, sc.td_us[i]);
  });
  Table t;
  t.columns = {"td_us", "V_unitless"};
  for (std::size_t i = 0; i < v.size(); ++i) t.add({sc.td_us[i], v[i]});
  ctx.emit_table("deer_trace", t);
}

deer::DeerTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path);
  std::string line;
  std::size_t lineno = 0;
  int col_td = -1, col_v = -1;
  deer::DeerTrace tr;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (col_td < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "td_us") col_td = static_cast<int>(i);
        if (cells[i] == "V_unitless" || cells[i] == "V") col_v = static_cast<int>(i);
      }
      if (col_td < 0 || col_v < 0) throw ParseError("trace " + path + ": header must name td_us and V_unitless columns", lineno);
      continue;
    }
    try {
      tr.td_us.push_back(std::stod(cells.at(static_cast<std::size_t>(col_td))));
      tr.V.push_back(std::stod(cells.at(static_cast<std::size_t>(col_v))));
    } catch (const std::exception&) {
      throw ParseError("trace " + path + ": malformed row '" + line + "'", lineno);
    }
  }
  if (col_td < 0) throw ParseError("trace " + path + ": missing header");
  return tr;
}

struct DeerFitArgs {
  std::string input;
  std::optional<double> pb;
};

void cmd_deer_fit(Context& ctx, const DeerFitArgs& a) {
  const deer::DeerTrace tr = read_trace(a.input);
  if (tr.td_us.size() < 8)
    throw ArgumentError("deer-fit: insufficient points (" + std::to_string(tr.td_us.size()) + ", need at least 8)");
  const double pB = a.pb.value_or(ctx.cfg.deer.scenario.pB);
  const deer::FitResult f = deer::fit_plane(tr, pB, ctx.cfg.deer.bounds, ctx.cfg.deer.scenario);
  json cov = {{f.covariance(0, 0), f.covariance(0, 1)}, {f.covariance(1, 0), f.covariance(1, 1)}};
  ctx.emit_json("deer_fit", {{"dx_nm", f.dx_nm},
                             {"C2D_per_nm2", f.C2D_per_nm2},
                             {"residual_ssr_unitless", f.residual},
                             {"flags", f.flags()},
                             {"covariance_dx_nm_C2D_per_nm2", cov},
                             {"iterations_count", f.iterations},
                             {"pB_prob", pB}});
}

// ---------------------------------------------------------------- snr

struct SnrArgs {
  std::string mode = "off_resonant";
  double V = 0.0;
  double points = 1.0;
};

void cmd_snr(Context& ctx, const SnrArgs& a) {
  const auto& b = ctx.cfg.snr;
  const snr::Mode mode = snr::parse_mode(a.mode);
  const double r = snr::r_opt(b);
  const double single = snr::snr_single_shot(b, a.V, mode);
  const double averaged = snr::averaged_snr(single, b.n_cycles);
  json assumptions = json::array({"photon shot noise only; no dark counts or background",
                                  "X treated as an input, no temperature dependence",
                                  "sigma/A is a direct input"});
  if (b.ensemble) assumptions.push_back("ensemble of n_probes independent probes, R scaled by sqrt(n_probes)");
  ctx.emit_json("snr", {{"r_opt_unitless", r},
                        {"r_single_unitless", single},
                        {"r_averaged_unitless", averaged},
                        {"t_total_s", snr::experiment_time(b.n_cycles, b.T_rep_us, a.points)},
                        {"mode", snr::to_string(mode)},
                        {"photons_per_window_count", snr::photon_count(b.P0_W, b.T_integr_us, b.wavelength_nm)},
                        {"assumptions", assumptions}});
}

// ---------------------------------------------------------------- yield

struct YieldArgs {
  std::optional<std::string> profile, window;
  std::optional<double> dose, aperture, decimation, devices;
};

void cmd_yield(Context& ctx, const YieldArgs& a) {
  const auto& f = ctx.cfg.fab;
  std::string path = a.profile ? *a.profile : config::resolve_profile(ctx.cfg);
  const fabstats::ImplantProfile prof = fabstats::parse_profile(path);
  const fabstats::ApertureSpec ap{a.aperture.value_or(f.aperture_diameter_nm), a.dose.value_or(f.dose_per_cm2),
                                  a.decimation.value_or(f.decimation)};
  const double n = a.devices.value_or(f.n_devices);
  const fabstats::Window w = a.window ? fabstats::parse_window(*a.window) : fabstats::Window{f.window_lo_nm, f.window_hi_nm};
  const double lambda = fabstats::expected_count(prof, ap);
  const double p_window = fabstats::depth_window_probability(prof, w.z1_nm, w.z2_nm);
  json hist = json::array();
  for (const auto& h : fabstats::poisson_histogram(lambda, n))
    hist.push_back({{"k_count", h.k}, {"probability_prob", h.probability}, {"expected_count", h.expected}, {"rounded_count", h.rounded}});
  const double usable = fabstats::usable_yield(lambda, p_window, n);
  ctx.emit_json("yield", {{"lambda_count", lambda},
                          {"histogram", hist},
                          {"p_window_prob", p_window},
                          {"window_nm", {w.z1_nm, w.z2_nm}},
                          {"usable_count", usable},
                          {"usable_rounded_count", std::lround(usable)},
                          {"vacancies_per_ion_count", prof.total()},
                          {"profile", path}});
}

// ---------------------------------------------------------------- photonics

void cmd_phc_bands(Context& ctx) {
  const auto& p = ctx.cfg.phc;
  photonics::PhcLattice lat = p.lattice;
  const auto diag = photonics::tm_bands(lat, photonics::k_path(static_cast<std::size_t>(p.k_points_per_segment)),
                                        static_cast<std::size_t>(p.n_planewaves), static_cast<std::size_t>(p.n_bands));
  Table t;
  t.columns = {"k_index", "k_label"};
  for (Eigen::Index b = 0; b < diag.bands.cols(); ++b) t.columns.push_back("band" + std::to_string(b + 1) + "_unitless");
  for (std::size_t i = 0; i < diag.path.points.size(); ++i) {
    std::vector<report::Cell> row = {static_cast<long long>(i), diag.path.points[i].label};
    for (Eigen::Index b = 0; b < diag.bands.cols(); ++b) row.emplace_back(diag.bands(static_cast<Eigen::Index>(i), b));
    t.add(std::move(row));
  }
  json gaps = json::array();
  auto add = [&](const std::vector<photonics::GapReport>& list) {
    for (const auto& g : list)
      gaps.push_back({{"kind", g.kind}, {"segment", g.segment}, {"lower_band_index", g.lower_band}, {"lower_edge_unitless", g.lower_edge},
                      {"upper_edge_unitless", g.upper_edge}, {"center_unitless", g.center}, {"width_unitless", g.width}});
  };
  add(photonics::find_gaps(diag));
  for (const auto& s : diag.path.segments) add(photonics::find_gaps(diag, s.name));
  const json gap_doc = {{"n_planewaves_count", diag.n_planewaves}, {"r_over_a_unitless", lat.r_over_a},
                        {"eps_background_unitless", lat.eps_background}, {"gaps", gaps}};
  if (ctx.format_or("csv") == "json") {
    ctx.emit("phc_gaps.json", report::to_json_text(gap_doc));
  } else {
    ctx.emit("phc_bands.csv", report::to_csv(t));
    if (!ctx.g.out_dir.empty()) ctx.emit("phc_gaps.json", report::to_json_text(gap_doc));
  }
}

struct DesignArgs {
  std::vector<double> omegas = {0.680, 0.467, 0.345};
};

void cmd_design(Context& ctx, const DesignArgs& a) {
  const auto& p = ctx.cfg.phc;
  Table t;
  t.columns = {"table", "index", "omega_unitless", "a_nm", "hole_diameter_nm", "a_drawn_nm", "hole_diameter_drawn_nm",
               "width_nm", "center_antinode", "selected"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  json lattices = json::array(), beams = json::array();
  for (std::size_t i = 0; i < a.omegas.size(); ++i) {
    const auto d = photonics::lattice_from_zpl(p.lambda_zpl_nm, a.omegas[i], p.lattice.r_over_a);
    t.add({std::string("lattice"), static_cast<long long>(i + 1), a.omegas[i], d.a_nm, d.hole_diameter_nm, d.a_drawn_nm,
           d.hole_diameter_drawn_nm, nan, false, false});
    lattices.push_back({{"omega_unitless", a.omegas[i]}, {"a_nm", d.a_nm}, {"hole_diameter_nm", d.hole_diameter_nm},
                        {"a_drawn_nm", d.a_drawn_nm}, {"hole_diameter_drawn_nm", d.hole_diameter_drawn_nm}});
  }
  const auto widths = photonics::nanobeam_widths(p.lambda_zpl_nm, p.nanobeam_max_m);
  const auto pick = photonics::select_nanobeam(widths, ctx.cfg.stripe.width_nm);
  for (const auto& w : widths) {
    const bool sel = pick && pick->m == w.m;
    t.add({std::string("nanobeam"), static_cast<long long>(w.m), nan, nan, nan, nan, nan, w.width_nm, w.has_center_antinode,
           sel});
    beams.push_back({{"m", w.m}, {"width_nm", w.width_nm}, {"center_antinode", w.has_center_antinode}, {"selected", sel}});
  }
  if (ctx.format_or("csv") == "json")
    ctx.emit("design.json", report::to_json_text({{"lattices", lattices},
                                                  {"nanobeams", beams},
                                                  {"lambda_zpl_nm", p.lambda_zpl_nm},
                                                  {"stripe_width_nm", ctx.cfg.stripe.width_nm}}));
  else
    ctx.emit("design.csv", report::to_csv(t));
}

// ---------------------------------------------------------------- reproduce

int cmd_reproduce(Context& ctx, const std::string& rows) {
  reproduce::Options opt;
  opt.seed = ctx.g.seed;
  std::stringstream ss(rows);
  for (std::string r; std::getline(ss, r, ',');)
    if (!r.empty()) opt.rows.push_back(r);
  const auto res = reproduce::run(ctx.cfg, opt);
  ctx.emit_table("reproduce", res.table());
  std::size_t failed = 0;
  for (const auto& r : res.rows)
    if (!r.pass) {
      ++failed;
      ctx.err << "FAIL " << r.id << ": computed " << report::format_number(r.computed) << ", tolerance " << r.tolerance
              << "\n";
    }
  ctx.err << res.rows.size() - failed << "/" << res.rows.size() << " rows pass\n";
  return failed ? exit_validation : exit_ok;
}

void write_manifest(Context& ctx, const std::string& sub, double wall_s, int code) {
  json m = {{"subcommand", sub},
            {"config_path", ctx.g.config_path},
            {"seed", ctx.g.seed},
            {"toolkit_version", SICYIG_VERSION},
            {"wall_time_s", wall_s},
            {"threads", parallel::thread_count()},
            {"exit_code", code},
            {"output_paths", ctx.outputs}};
  if (ctx.g.out_dir.empty()) {
    ctx.err << m.dump() << "\n";
  } else {
    const std::string path = (fs::path(ctx.g.out_dir) / "manifest.json").string();
    report::write_file(path, m.dump(2) + "\n");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and simulation toolkit for the SiC-YIG ODPELDOR sensor", "sicyig"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", SICYIG_VERSION);
  Globals g;
  app.add_option("--config", g.config_path, "Config file (JSON), or 'paper-defaults'");
  app.add_option("--out", g.out_dir, "Output directory; data goes to stdout when absent");
  app.add_option("--seed", g.seed, "Seed for Monte-Carlo and noise streams");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "Worker threads (overrides SICYIG_THREADS)")->check(CLI::Range(1u, 4096u));

  FieldMapArgs fm;
  auto* s_field = app.add_subcommand("field-map", "Stripe dipolar field and gradient on an (x, z) grid");
  s_field->add_flag("--xopt", fm.xopt, "Print the gradient-optimal distance instead of a map");
  s_field->add_option("--x-lo", fm.x_lo, "nm");
  s_field->add_option("--x-hi", fm.x_hi, "nm");
  s_field->add_option("--x-step", fm.x_step, "nm");
  s_field->add_option("--z-lo", fm.z_lo, "nm");
  s_field->add_option("--z-hi", fm.z_hi, "nm");
  s_field->add_option("--z-step", fm.z_step, "nm");

  SwrArgs sw;
  auto* s_swr = app.add_subcommand("swr", "Spin-wave resonance lines or dispersion map of the stripe");
  s_swr->add_option("--drive-GHz", sw.drive_GHz, "Drive frequency; defaults to the config microwave frequency");
  s_swr->add_option("--b0-lo", sw.b0_lo, "G");
  s_swr->add_option("--b0-hi", sw.b0_hi, "G");
  s_swr->add_option("--b0-step", sw.b0_step, "G");
  s_swr->add_flag("--dispersion", sw.dispersion, "Emit B0_G,mode,freq_GHz instead of lines");
  s_swr->add_option("--modes", sw.modes, "Modes in the dispersion map");

  EprArgs ep;
  auto* s_epr = app.add_subcommand("epr-spectrum", "EPR/ODMR spectra of the configured spin systems");
  s_epr->add_option("--system", ep.systems, "Spin system labels to include");
  s_epr->add_flag("--gradient", ep.gradient, "Shift lines by the stripe field at the probe and target depths");
  s_epr->add_flag("--oriented", ep.oriented, "Field along z for every system instead of powder averages");
  s_epr->add_option("--orientations", ep.orientations, "Powder orientations");
  s_epr->add_option("--b-lo", ep.b_lo, "G");
  s_epr->add_option("--b-hi", ep.b_hi, "G");
  s_epr->add_option("--b-step", ep.b_step, "G");

  DeerSimArgs ds;
  auto* s_dsim = app.add_subcommand("deer-sim", "DEER trace of a probe under a 2D target plane");
  s_dsim->add_option("--dx", ds.dx, "nm");
  s_dsim->add_option("--c2d", ds.c2d, "per nm^2");
  s_dsim->add_option("--pb", ds.pb, "pump flip probability");
  s_dsim->add_flag("--shell-product", ds.shell_product, "Use the shell product instead of the exponential form");

  DeerFitArgs df;
  auto* s_dfit = app.add_subcommand("deer-fit", "Fit dx and C2D to a td_us,V trace");
  s_dfit->add_option("input", df.input, "CSV trace")->required();
  s_dfit->add_option("--pb", df.pb, "pump flip probability");

  SnrArgs sn;
  auto* s_snr = app.add_subcommand("snr", "Shot-noise SNR budget");
  s_snr->add_option("--mode", sn.mode, "off_resonant or resonant");
  s_snr->add_option("--V", sn.V, "DEER signal value");
  s_snr->add_option("--points", sn.points, "Spectrum points for the time budget");

  YieldArgs yl;
  auto* s_yield = app.add_subcommand("yield", "Implantation yield statistics");
  s_yield->add_option("--profile", yl.profile, "Vacancy profile file");
  s_yield->add_option("--dose", yl.dose, "ions per cm^2");
  s_yield->add_option("--aperture-nm", yl.aperture, "Aperture diameter");
  s_yield->add_option("--decimation", yl.decimation, "Fraction of vacancies becoming centers");
  s_yield->add_option("--devices", yl.devices, "Devices fabricated in parallel");
  s_yield->add_option("--window", yl.window, "Depth window z1:z2 in nm");

  auto* s_phc = app.add_subcommand("phc-bands", "TM band structure and gaps of the triangular hole lattice");

  DesignArgs de;
  auto* s_design = app.add_subcommand("design", "Lattice constants, hole diameters and nanobeam widths");
  s_design->add_option("--omega", de.omegas, "Normalized gap frequencies");

  std::string rows;
  auto* s_repro = app.add_subcommand("reproduce", "Recompute every reference number into one table");
  s_repro->add_option("--rows", rows, "Comma-separated row ids or groups");

  auto* s_defaults = app.add_subcommand("defaults", "Write the default config");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << SICYIG_VERSION << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_validation;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  int code = exit_ok;
  std::optional<Context> ctx;
  try {
    if (g.threads > 0) parallel::set_thread_count(g.threads);
    ctx.emplace(Context{g, config::defaults(), out, err, {}});
    if (!g.out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(g.out_dir, ec);
      if (ec) {
        ctx->g.out_dir.clear();
        throw IoError("cannot create output directory " + g.out_dir + ": " + ec.message());
      }
    }
    ctx->cfg = load(g, err);
    if (sub == s_field) cmd_field_map(*ctx, fm);
    else if (sub == s_swr) cmd_swr(*ctx, sw);
    else if (sub == s_epr) cmd_epr(*ctx, ep);
    else if (sub == s_dsim) cmd_deer_sim(*ctx, ds);
    else if (sub == s_dfit) cmd_deer_fit(*ctx, df);
    else if (sub == s_snr) cmd_snr(*ctx, sn);
    else if (sub == s_yield) cmd_yield(*ctx, yl);
    else if (sub == s_phc) cmd_phc_bands(*ctx);
    else if (sub == s_design) cmd_design(*ctx, de);
    else if (sub == s_repro) code = cmd_reproduce(*ctx, rows);
    else if (sub == s_defaults) ctx->emit("paper-defaults.json", config::dump_config(ctx->cfg));
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    code = exit_numerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = exit_validation;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ctx) {
    try {
      write_manifest(*ctx, name, wall, code);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      if (code == exit_ok) code = exit_validation;
    }
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace sicyig::cli
