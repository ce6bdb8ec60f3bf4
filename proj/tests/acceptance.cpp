#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sicyig/config.hpp"
#include "sicyig/fabstats.hpp"
#include "sicyig/magnetostatics.hpp"
#include "sicyig/photonics.hpp"
#include "sicyig/reproduce.hpp"
#include "sicyig/snr.hpp"
#include "sicyig/spin_spectra.hpp"

using namespace sicyig;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double v, double ref, double tol) { return std::abs(v - ref) <= tol; }
bool rel(double v, double ref, double frac) { return std::abs(v - ref) <= frac * std::abs(ref); }

void criterion1(Outcome& o) {
  magnetostatics::StripeGeometry g;
  const auto a = magnetostatics::find_xopt(g);
  g.width_nm = 800.0;
  const auto b = magnetostatics::find_xopt(g);
  o.detail << "g=" << a.g_max_G_per_nm << " G/nm x_opt=" << a.x_opt_nm << " nm x_opt(W=800)=" << b.x_opt_nm << " nm";
  o.check(rel(a.g_max_G_per_nm, 0.5, 0.10), "gradient 0.5 +-10%");
  o.check(within(a.x_opt_nm, 150.0, 10.0), "x_opt 150 +-10");
  o.check(within(b.x_opt_nm, 230.0, 15.0), "x_opt(W=800) 230 +-15");
}

void criterion2(Outcome& o) {
  const magnetostatics::StripeGeometry g;
  const double x = magnetostatics::find_xopt(g).x_opt_nm;
  const double h0 = magnetostatics::homogeneity_report(g, x, 30.0);
  const double h1 = magnetostatics::homogeneity_report(g, x - 10.0, 30.0);
  o.detail << "dBz=" << h0 << " G at x_opt, " << h1 << " G at x_opt-10";
  o.check(h0 <= 0.1, "<= 0.1 G at x_opt");
  o.check(h1 <= 0.3, "<= 0.3 G at x_opt-10");
}

void criterion3(Outcome& o) {
  const double ge = 2.0028;
  const double refs[][2] = {{50.0, 7.1}, {10.0, 35.7}, {4.0, 89.0}};
  for (const auto& [t2, mG] : refs) {
    const double lw = 1e3 * spectra::linewidth_from_T2(t2, ge);
    o.detail << lw << " mG ";
    o.check(rel(lw, mG, 0.02), "linewidth at T2=" + std::to_string(t2));
  }
  const double r1 = spectra::depth_resolution(0.09, 0.5), r2 = spectra::depth_resolution(0.05, 0.5);
  o.detail << "resolution " << r1 << " / " << r2 << " A";
  o.check(within(r1, 1.8, 1e-12), "1.8 A");
  o.check(within(r2, 1.0, 1e-12), "1.0 A");
}

void criterion4(Outcome& o) {
  const snr::SnrBudget b;
  const double gain = snr::snr_single_shot(b, 0.0, snr::Mode::resonant) / snr::snr_single_shot(b, 0.0, snr::Mode::off_resonant);
  const double avg = snr::averaged_snr(1.0, 5000.0);
  snr::SnrBudget pess = b;
  pess.p_coll = 0.01;
  pess.p_det = 0.04;
  const double factor = snr::r_opt(pess) / snr::r_opt(b);
  const double averaged = snr::averaged_snr(90.0, 5000.0);
  const double r_p = averaged * factor;
  const double t1 = snr::experiment_time(5000.0, 200.0, 1.0), t100 = snr::experiment_time(5000.0, 200.0, 100.0);
  const double r = snr::r_opt(b);
  o.detail << "gain=" << gain << " avg=" << avg << " averaged=" << averaged << " factor=" << factor << " R_pess=" << r_p << " t=" << t1 << "/" << t100
           << " s R_opt=" << r;
  o.check(within(gain, 50.0, 1e-9), "resonant gain 50");
  o.check(within(avg, 70.7, 0.05), "sqrt(5000) = 70.7");
  o.check(within(factor, 0.0447, 5e-5), "collection ratio 0.0447");
  o.check(within(averaged, 6300.0, 100.0), "averaged ~6300");
  o.check(r_p >= 282.0 && r_p <= 286.0, "pessimistic 282-286");
  o.check(within(t1, 1.0, 1e-12) && within(t100, 100.0, 1e-10), "experiment times");
  o.check(r >= 5000.0 / 4.0 && r <= 5000.0 * 4.0, "R_opt within x/4 of 5000");
}

void criterion5(Outcome& o) {
  const auto h = fabstats::poisson_histogram(1.0, 100.0);
  const long expected[] = {37, 37, 18, 6};
  const double masses[] = {0.3679, 0.3679, 0.1839, 0.0613};
  for (int k = 0; k < 4; ++k) {
    const auto& bin = h.at(static_cast<std::size_t>(k));
    o.detail << bin.rounded << (k < 3 ? "/" : "");
    o.check(bin.rounded == expected[k], "count k=" + std::to_string(k));
    o.check(within(bin.probability, masses[k], 5e-5), "mass k=" + std::to_string(k));
  }
  const double usable = fabstats::usable_yield(1.0, 0.14, 100.0);
  o.detail << " usable=" << usable;
  o.check(std::lround(usable) == 5, "usable yield 5");
}

void criterion6(Outcome& o) {
  const config::SensorConfig cfg = config::defaults();
  photonics::PhcLattice lat = cfg.phc.lattice;
  const auto diag = photonics::tm_bands(lat, photonics::k_path(24), 441, 10);
  auto widest = [](std::vector<photonics::GapReport> gaps, std::size_t n) {
    std::stable_sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return a.width > b.width; });
    if (gaps.size() > n) gaps.resize(n);
    std::sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return a.center > b.center; });
    return gaps;
  };
  const auto complete = widest(photonics::find_gaps(diag), 1);
  const auto km = widest(photonics::find_gaps(diag, std::string("K-M")), 2);
  o.check(complete.size() == 1 && km.size() == 2, "gaps found");
  if (complete.size() == 1) {
    o.detail << "complete=" << complete[0].center;
    o.check(within(complete[0].center, 0.680, 0.03), "complete gap 0.680 +-0.03");
  }
  if (km.size() == 2) {
    o.detail << " K-M=" << km[0].center << "," << km[1].center;
    o.check(within(km[0].center, 0.467, 0.03), "K-M gap 0.467 +-0.03");
    o.check(within(km[1].center, 0.345, 0.03), "K-M gap 0.345 +-0.03");
  }
  const double designs[][3] = {{0.680, 622, 360}, {0.467, 427, 248}, {0.345, 316, 184}};
  for (const auto& [w, a, d] : designs) {
    const auto des = photonics::lattice_from_zpl(915.0, w, 0.29);
    o.detail << " (" << des.a_drawn_nm << "," << des.hole_diameter_drawn_nm << ")";
    o.check(des.a_drawn_nm == a && des.hole_diameter_drawn_nm == d, "design for " + std::to_string(w));
  }
  const auto nb = photonics::nanobeam_widths(915.0, 3);
  const double widths[] = {457, 915, 1372};
  for (std::size_t m = 0; m < 3; ++m) {
    o.detail << (m ? "/" : " widths ") << std::floor(nb[m].width_nm);
    o.check(std::floor(nb[m].width_nm) == widths[m], "nanobeam width m=" + std::to_string(m + 1));
  }
}

void from_reproduce(Outcome& o, const std::string& group) {
  reproduce::Options opt;
  opt.rows = {group};
  opt.seed = 0;
  const auto res = reproduce::run(config::defaults(), opt);
  std::size_t ok = 0;
  for (const auto& r : res.rows) {
    if (r.pass) ++ok;
    o.check(r.pass, r.id + " computed " + std::to_string(r.computed));
  }
  o.detail << ok << "/" << res.rows.size() << " checks";
  o.check(!res.rows.empty(), "rows present");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double max_seconds;  // <= 0: no runtime bound
    std::function<void(Outcome&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, 1.0, criterion1},
      {2, 1.0, criterion2},
      {3, 0.0, criterion3},
      {4, 0.0, criterion4},
      {5, 0.0, criterion5},
      {6, 60.0, criterion6},
      {7, 120.0, [](Outcome& o) { from_reproduce(o, "deer"); }},
      {8, 0.0, [](Outcome& o) { from_reproduce(o, "spectra"); }},
      {9, 0.0, [](Outcome& o) { from_reproduce(o, "swr"); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (c.max_seconds > 0.0) o.check(dt < c.max_seconds, "runtime < " + std::to_string(c.max_seconds) + " s");
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", dt, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
