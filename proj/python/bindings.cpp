#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sicyig/cli.hpp"
#include "sicyig/config.hpp"
#include "sicyig/deer.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/fabstats.hpp"
#include "sicyig/magnetostatics.hpp"
#include "sicyig/photonics.hpp"
#include "sicyig/reproduce.hpp"
#include "sicyig/snr.hpp"
#include "sicyig/spin_spectra.hpp"
#include "sicyig/swr.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace sicyig;

namespace {

magnetostatics::StripeGeometry stripe(double width, double thickness, double b_sat) {
  magnetostatics::StripeGeometry g;
  g.width_nm = width;
  g.thickness_nm = thickness;
  g.b_sat_G = b_sat;
  return g;
}

spectra::SpinSystem named_system(const std::string& name) {
  if (name == "v2") return spectra::v2_center();
  if (name == "nitroxide") return spectra::nitroxide();
  if (name == "gadolinium") return spectra::gadolinium();
  if (name == "trityl") return spectra::trityl();
  throw ArgumentError("unknown spin system '" + name + "' (v2, nitroxide, gadolinium, trityl)");
}

deer::DeerScenario scenario(double dx, double c2d, double pb) {
  deer::DeerScenario sc;
  sc.dx_nm = dx;
  sc.C2D_per_nm2 = c2d;
  sc.pB = pb;
  return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = SICYIG_VERSION;

  const auto& base = py::register_exception<Error>(m, "SicyigError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", base);

  m.def(
      "find_xopt",
      [](double width, double thickness, double b_sat) {
        const auto o = magnetostatics::find_xopt(stripe(width, thickness, b_sat));
        return py::dict("x_opt_nm"_a = o.x_opt_nm, "g_max_G_per_nm"_a = o.g_max_G_per_nm);
      },
      "width_nm"_a = 500.0, "thickness_nm"_a = 100.0, "b_sat_G"_a = 1700.0);

  m.def(
      "stripe_field",
      [](double x, double z, double width, double thickness, double b_sat) {
        return magnetostatics::stripe_field(stripe(width, thickness, b_sat), Vec3(x, 0.0, z));
      },
      "x_nm"_a, "z_nm"_a, "width_nm"_a = 500.0, "thickness_nm"_a = 100.0, "b_sat_G"_a = 1700.0);

  m.def(
      "homogeneity",
      [](double x, double half_range, double width, double thickness, double b_sat) {
        return magnetostatics::homogeneity_report(stripe(width, thickness, b_sat), x, half_range);
      },
      "x_nm"_a, "z_half_range_nm"_a = 30.0, "width_nm"_a = 500.0, "thickness_nm"_a = 100.0, "b_sat_G"_a = 1700.0);

  m.def(
      "swr_lines",
      [](double freq, double lo, double hi, double step) {
        py::list out;
        for (const auto& l : swr::swr_lines(config::defaults().swr, freq, lo, hi, step))
          out.append(py::dict("mode_index"_a = l.mode_index, "resonance_field_G"_a = l.resonance_field_G,
                              "oscillator_strength"_a = l.oscillator_strength, "edge_localized"_a = l.edge_localized));
        return out;
      },
      "freq_GHz"_a = 9.7, "b0_lo_G"_a = 2000.0, "b0_hi_G"_a = 4500.0, "b0_step_G"_a = 1.0);

  m.def(
      "resonance_fields",
      [](const std::string& system, double freq, const Vec3& direction) {
        py::list out;
        for (const auto& l : spectra::resonance_fields(named_system(system), freq, direction))
          out.append(py::dict("resonance_field_G"_a = l.resonance_field_G, "amplitude"_a = l.amplitude));
        return out;
      },
      "system"_a, "freq_GHz"_a = 9.7, "direction"_a = Vec3(0.0, 0.0, 1.0));

  m.def(
      "deer_signal",
      [](const std::vector<double>& td, double dx, double c2d, double pb, bool shell_product) {
        const deer::DeerScenario sc = scenario(dx, c2d, pb);
        std::vector<double> v;
        for (double t : td) v.push_back(shell_product ? deer::plane_signal_shell_product(sc, t) : deer::plane_signal(sc, t));
        return v;
      },
      "td_us"_a, "dx_nm"_a = 6.0, "C2D_per_nm2"_a = 1.0 / 49.0, "pB"_a = 0.5, "shell_product"_a = false);

  m.def(
      "mc_oracle",
      [](double td, double dx, double c2d, double pb, std::size_t n_config, std::uint64_t seed) {
        const auto e = deer::mc_oracle(scenario(dx, c2d, pb), td, n_config, 100000, seed);
        return py::dict("V"_a = e.V, "std_error"_a = e.std_error);
      },
      "td_us"_a, "dx_nm"_a = 6.0, "C2D_per_nm2"_a = 1.0 / 49.0, "pB"_a = 0.5, "n_config"_a = 2000, "seed"_a = 0);

  m.def(
      "deer_fit",
      [](const std::vector<double>& td, const std::vector<double>& v, double pb) {
        const deer::FitResult f = deer::fit_plane(deer::DeerTrace{td, v}, pb, deer::FitBounds{});
        return py::dict("dx_nm"_a = f.dx_nm, "C2D_per_nm2"_a = f.C2D_per_nm2, "residual"_a = f.residual,
                        "covariance"_a = f.covariance, "flags"_a = f.flags());
      },
      "td_us"_a, "V"_a, "pB"_a = 0.5);

  m.def(
      "r_opt",
      [](double p_coll, double p_det, double t2) {
        snr::SnrBudget b;
        b.p_coll = p_coll;
        b.p_det = p_det;
        b.T2_us = t2;
        return snr::r_opt(b);
      },
      "p_coll"_a = 0.5, "p_det"_a = 0.4, "T2_us"_a = 12.5);

  m.def(
      "poisson_histogram",
      [](double lambda, double n_devices) {
        py::list out;
        for (const auto& h : fabstats::poisson_histogram(lambda, n_devices))
          out.append(py::dict("k"_a = h.k, "probability"_a = h.probability, "rounded"_a = h.rounded));
        return out;
      },
      "lambda_"_a, "n_devices"_a = 100.0);
  m.def("usable_yield", &fabstats::usable_yield, "lambda_"_a, "p_window"_a, "n_devices"_a = 100.0);

  m.def(
      "tm_bands",
      [](double r_over_a, std::size_t n_pw, std::size_t per_segment, std::size_t n_bands) {
        photonics::PhcLattice lat;
        lat.r_over_a = r_over_a;
        const auto d = photonics::tm_bands(lat, photonics::k_path(per_segment), n_pw, n_bands);
        py::list gaps;
        for (const auto& g : photonics::find_gaps(d))
          gaps.append(py::dict("kind"_a = g.kind, "lower_band"_a = g.lower_band, "center"_a = g.center, "width"_a = g.width));
        return py::dict("bands"_a = d.bands, "gaps"_a = gaps);
      },
      "r_over_a"_a = 0.29, "n_planewaves"_a = 441, "k_points_per_segment"_a = 24, "n_bands"_a = 10);

  m.def(
      "lattice_from_zpl",
      [](double lambda, double omega, double r_over_a) {
        const auto d = photonics::lattice_from_zpl(lambda, omega, r_over_a);
        return py::dict("a_nm"_a = d.a_nm, "a_drawn_nm"_a = d.a_drawn_nm, "hole_diameter_drawn_nm"_a = d.hole_diameter_drawn_nm);
      },
      "lambda_zpl_nm"_a, "omega"_a, "r_over_a"_a = 0.29);

  m.def(
      "nanobeam_widths",
      [](double lambda, int max_m) {
        std::vector<double> w;
        for (const auto& n : photonics::nanobeam_widths(lambda, max_m)) w.push_back(n.width_nm);
        return w;
      },
      "lambda_zpl_nm"_a = 915.0, "max_m"_a = 3);

  m.def("default_config_json", [] { return config::dump_config(config::defaults()); });

  m.def(
      "reproduce",
      [](const std::vector<std::string>& rows, std::uint64_t seed) {
        reproduce::Options opt;
        opt.rows = rows;
        opt.seed = seed;
        py::list out;
        for (const auto& r : reproduce::run(config::defaults(), opt).rows)
          out.append(py::dict("claim_id"_a = r.id, "group"_a = r.group, "reference_value"_a = r.reference,
                              "computed_value"_a = r.computed, "pass"_a = r.pass));
        return out;
      },
      "rows"_a = std::vector<std::string>{}, "seed"_a = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a);
}
