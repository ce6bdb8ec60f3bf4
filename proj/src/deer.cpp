#include "sicyig/deer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/numeric.hpp"
#include "sicyig/parallel.hpp"

namespace sicyig::deer {

using constants::pi;

void DeerScenario::validate() const {
  if (!(dx_nm > 0.0)) throw ArgumentError("deer: dx must be positive");
  if (!(C2D_per_nm2 >= 0.0)) throw ArgumentError("deer: C2D must be >= 0");
  if (!(pB >= 0.0 && pB <= 1.0)) throw ArgumentError("deer: pB must lie in [0, 1]");
  if (!(b0_direction.norm() > 0.0)) throw ArgumentError("deer: B0 direction must be nonzero");
  if (!(g_probe > 0.0) || !(g_target > 0.0)) throw ArgumentError("deer: g values must be positive");
  for (double td : td_us) {
    if (td < 0.0) throw ArgumentError("deer: td must be >= 0");
    if (td > 2.0 * t0_us + 1e-12)
      throw ArgumentError("deer: td exceeds 2 t0 (pump pulse outside the echo sequence)");
  }
}

std::string DeerScenario::geometry_label() const {
  const Vec3 n = b0_direction.normalized();
  if (std::abs(std::abs(n.x()) - 1.0) < 1e-12) return "normal";
  if (std::abs(n.x()) < 1e-12) return "in-plane";
  return "oblique";
}

double dipolar_frequency(const Vec3& r, const Vec3& b0_direction, double g1, double g2) {
  const double d = r.norm();
  if (d == 0.0) throw DomainError("dipolar_frequency: zero separation");
  if (b0_direction.norm() == 0.0) throw ArgumentError("dipolar_frequency: zero B0 direction");
  const double c = r.dot(b0_direction.normalized()) / d;
  return constants::dipolar_MHz_nm3 * (g1 * g2 / 4.0) * (1.0 - 3.0 * c * c) / (d * d * d);
}

double pair_signal(double td_us, double nu_MHz, double pB) {
  if (td_us < 0.0) throw ArgumentError("pair_signal: td must be >= 0");
  return 1.0 - pB * (1.0 - std::cos(2.0 * pi * nu_MHz * td_us));
}

namespace {

struct ShellWalker {
  const DeerScenario& sc;
  double td;
  const QuadratureOptions& opt;
  Vec3 n;
  bool axial;
  bool in_plane;
  double nu0;  // coupling prefactor, MHz nm^3
  numeric::QuadratureRule gl;

  ShellWalker(const DeerScenario& s, double t, const QuadratureOptions& o)
      : sc(s), td(t), opt(o), n(s.b0_direction.normalized()),
        axial(std::abs(std::abs(n.x()) - 1.0) < 1e-12), in_plane(std::abs(n.x()) < 1e-12),
        nu0(constants::dipolar_MHz_nm3 * s.g_probe * s.g_target / 4.0),
        gl(numeric::gauss_legendre(static_cast<std::size_t>(o.gl_order))) {}

  double phase(double rho, double cphi, double sphi) const {
    const Vec3 r(sc.dx_nm, rho * cphi, rho * sphi);
    const double d2 = r.squaredNorm();
    const double d = std::sqrt(d2);
    const double c = r.dot(n) / d;
    return 2.0 * pi * td * nu0 * (1.0 - 3.0 * c * c) / (d2 * d);
  }

  // int_0^{2 pi} (1 - cos(phase)) dphi at radius rho.
  double azimuthal(double rho) const {
    if (axial) return 2.0 * pi * (1.0 - std::cos(phase(rho, 1.0, 0.0)));
    const double r = std::hypot(sc.dx_nm, rho);
    if (in_plane) {
      // phase = alpha - beta cos(2 psi); the azimuthal mean of cos is cos(alpha) J0(beta)
      const double amp = 2.0 * pi * td * nu0 / (r * r * r);
      const double beta = amp * 1.5 * rho * rho / (r * r);
      return 2.0 * pi * (1.0 - std::cos(amp - beta) * std::cyl_bessel_j(0.0, beta));
    }
    const double span = 2.0 * pi * td * nu0 * 3.0 / (r * r * r);
    const int m = std::max(opt.n_phi, static_cast<int>(std::ceil(span + 20.0 * std::cbrt(0.5 * span) + 24.0)));
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * pi * (k + 0.5) / m;
      s += 1.0 - std::cos(phase(rho, std::cos(phi), std::sin(phi)));
    }
    return s * 2.0 * pi / m;
  }

  // int_a^b rho F(rho) drho with panels short enough to resolve the phase.
  double shell(double a, double b) const {
    const double r_in = std::hypot(sc.dx_nm, a);
    const double rate = 2.0 * pi * td * 12.0 * nu0 / std::pow(r_in, 4);  // bound on |dphase/drho|
    const double h_osc = rate > 0.0 ? pi / rate : b - a;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h_osc)));
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      double part = 0.0;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double rho = mid + 0.5 * h * gl.nodes[k];
        part += gl.weights[k] * rho * azimuthal(rho);
      }
      sum += 0.5 * h * part;
    }
    return sum;
  }

  // Walks outward shell by shell, calling on_shell(a, b, integral), until the
  // tail is negligible. Returns {total, outer radius}.
  template <class OnShell>
  std::pair<double, double> walk(OnShell&& on_shell) const {
    double total = 0.0;
    double a = 0.0;
    double b = opt.r_min_nm;
    for (int s = 0; s < opt.max_shells; ++s) {
      const double part = shell(a, b);
      total += part;
      on_shell(a, b, part);
      const double r_out = std::hypot(sc.dx_nm, b);
      const double max_phase = 2.0 * pi * td * 2.0 * nu0 / (r_out * r_out * r_out);
      // Beyond the oscillatory zone the integrand falls as rho^-5 and the
      // remaining tail is a geometric series in the shell ratio.
      if (max_phase < 0.1 && part <= 0.05 * opt.rel_tol * total) return {total, b};
      a = b;
      b *= opt.shell_ratio;
    }
    std::ostringstream msg;
    msg << "plane_signal: bath quadrature not converged after " << opt.max_shells
        << " shells (dx = " << sc.dx_nm << " nm, td = " << td << " us, radius = " << b << " nm)";
    throw NumericalError(msg.str());
  }
};

void check_options(const QuadratureOptions& o) {
  if (o.n_phi < 8 || o.gl_order < 2 || !(o.r_min_nm > 0.0) || !(o.shell_ratio > 1.0) ||
      !(o.rel_tol > 0.0) || o.max_shells < 1)
    throw ArgumentError("deer: invalid quadrature options");
}

}  // namespace

double bath_integral(const DeerScenario& sc, double td_us, const QuadratureOptions& opt) {
  sc.validate();
  check_options(opt);
  if (td_us < 0.0) throw ArgumentError("deer: td must be >= 0");
  if (td_us == 0.0) return 0.0;
  return ShellWalker(sc, td_us, opt).walk([](double, double, double) {}).first;
}

double truncation_radius(const DeerScenario& sc, double td_us, const QuadratureOptions& opt) {
  sc.validate();
  check_options(opt);
  if (td_us <= 0.0) return opt.r_min_nm;
  return ShellWalker(sc, td_us, opt).walk([](double, double, double) {}).second;
}

double plane_signal(const DeerScenario& sc, double td_us, const QuadratureOptions& opt) {
  if (sc.C2D_per_nm2 == 0.0 || sc.pB == 0.0 || td_us == 0.0) {
    sc.validate();
    return 1.0;
  }
  return std::exp(-sc.C2D_per_nm2 * sc.pB * bath_integral(sc, td_us, opt));
}

double plane_signal_shell_product(const DeerScenario& sc, double td_us,
                                  const QuadratureOptions& opt) {
  sc.validate();
  check_options(opt);
  if (sc.C2D_per_nm2 == 0.0 || sc.pB == 0.0 || td_us == 0.0) return 1.0;
  double log_v = 0.0;
  bool extinct = false;
  ShellWalker(sc, td_us, opt).walk([&](double a, double b, double part) {
    const double area = pi * (b * b - a * a);
    const double flip = sc.pB * part / area;  // pB <1 - cos> over the shell
    if (flip >= 1.0) {
      extinct = true;
      return;
    }
    log_v += sc.C2D_per_nm2 * area * std::log1p(-flip);
  });
  return extinct ? 0.0 : std::exp(log_v);
}

DeerTrace time_trace(const DeerScenario& sc, const QuadratureOptions& opt) {
  sc.validate();
  if (sc.td_us.empty()) throw ArgumentError("time_trace: empty td grid");
  if (!std::is_sorted(sc.td_us.begin(), sc.td_us.end()))
    throw ArgumentError("time_trace: td grid must be sorted");
  DeerTrace t;
  t.td_us = sc.td_us;
  t.V.resize(sc.td_us.size());
  parallel::parallel_for(sc.td_us.size(), [&](std::size_t i) { t.V[i] = plane_signal(sc, sc.td_us[i], opt); });
  return t;
}

McEstimate mc_oracle(const DeerScenario& sc, double td_us, std::size_t n_config,
                     std::size_t n_spins_cap, std::uint64_t seed) {
  sc.validate();
  if (n_config < 100) throw ArgumentError("mc_oracle: n_config must be at least 100");
  if (td_us < 0.0) throw ArgumentError("mc_oracle: td must be >= 0");
  McEstimate est;
  est.n_config = n_config;
  // Disc large enough that the neglected bath, bounded with 1 - cos x <= x^2 / 2
  // and |1 - 3 cos^2| <= 2, changes V by less than 1e-4 relative.
  {
    const double nu_max = 2.0 * constants::dipolar_MHz_nm3 * sc.g_probe * sc.g_target / 4.0;
    const double w = 2.0 * pi * nu_max * td_us;
    const double tail_tol = 1e-4;
    const double r_tail = std::pow(pi * w * w * sc.C2D_per_nm2 * sc.pB / (4.0 * tail_tol), 0.25);
    const double r_osc = std::cbrt(w / 0.1);
    est.disc_radius_nm = std::max({r_tail, r_osc, 2.0 * sc.dx_nm});
  }
  est.mean_spins = sc.C2D_per_nm2 * pi * est.disc_radius_nm * est.disc_radius_nm;
  if (est.mean_spins > static_cast<double>(n_spins_cap))
    throw ArgumentError("mc_oracle: mean spin count " + std::to_string(est.mean_spins) +
                        " exceeds the cap " + std::to_string(n_spins_cap));

  const double nu0 = constants::dipolar_MHz_nm3 * sc.g_probe * sc.g_target / 4.0;
  const Vec3 n = sc.b0_direction.normalized();
  std::vector<double> values(n_config);
  parallel::parallel_for(n_config, [&](std::size_t c) {
    // Counter-based seeding: configuration c draws from its own stream.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::poisson_distribution<std::size_t> count(est.mean_spins > 0.0 ? est.mean_spins : 1e-300);
    const std::size_t spins = est.mean_spins > 0.0 ? count(rng) : 0;
    if (spins > n_spins_cap) throw ArgumentError("mc_oracle: spin cap exceeded in a configuration");
    double product = 1.0;
    for (std::size_t k = 0; k < spins; ++k) {
      const double rho = est.disc_radius_nm * std::sqrt(uniform());
      const double phi = 2.0 * pi * uniform();
      const Vec3 r(sc.dx_nm, rho * std::cos(phi), rho * std::sin(phi));
      const double d = r.norm();
      const double cth = r.dot(n) / d;
      const double nu = nu0 * (1.0 - 3.0 * cth * cth) / (d * d * d);
      product *= 1.0 - sc.pB * (1.0 - std::cos(2.0 * pi * nu * td_us));
    }
    values[c] = product;
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_config);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n_config - 1);
  est.V = mean;
  est.std_error = std::sqrt(var / static_cast<double>(n_config));
  return est;
}

std::vector<std::string> FitResult::flags() const {
  std::vector<std::string> f;
  if (bound_active) f.emplace_back("bound-active");
  if (ill_conditioned) f.emplace_back("ill-conditioned");
  return f;
}

namespace {

struct FitModel {
  const DeerTrace& data;
  double pB;
  DeerScenario geometry;
  const QuadratureOptions& opt;

  std::vector<double> kernel(double dx) const {
    DeerScenario sc = geometry;
    sc.dx_nm = dx;
    sc.td_us.clear();
    std::vector<double> k(data.td_us.size());
    parallel::parallel_for(k.size(), [&](std::size_t i) { k[i] = bath_integral(sc, data.td_us[i], opt); });
    return k;
  }

  Eigen::VectorXd residuals(const std::vector<double>& k, double c) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(k.size()));
    for (std::size_t i = 0; i < k.size(); ++i)
      r(static_cast<Eigen::Index>(i)) = std::exp(-c * pB * k[i]) - data.V[i];
    return r;
  }

  Eigen::MatrixXd jacobian(double dx, double c, const std::vector<double>& k) const {
    const double h = 1e-4 * dx;
    const std::vector<double> kp = kernel(dx + h);
    const std::vector<double> km = kernel(dx - h);
    Eigen::MatrixXd j(static_cast<Eigen::Index>(k.size()), 2);
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double v = std::exp(-c * pB * k[i]);
      const auto ii = static_cast<Eigen::Index>(i);
      j(ii, 0) = -c * pB * v * (kp[i] - km[i]) / (2.0 * h);
      j(ii, 1) = -pB * k[i] * v;
    }
    return j;
  }
};

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

}  // namespace

FitResult fit_plane(const DeerTrace& trace, double pB, const FitBounds& bounds,
                    const DeerScenario& geometry, const QuadratureOptions& opt) {
  if (trace.td_us.size() != trace.V.size()) throw ArgumentError("fit_plane: td/V size mismatch");
  if (trace.td_us.size() < 8) throw ArgumentError("fit_plane: insufficient points (need at least 8)");
  if (!(pB > 0.0 && pB <= 1.0)) throw ArgumentError("fit_plane: pB must lie in (0, 1]");
  const bool finite = std::isfinite(bounds.dx_lo_nm) && std::isfinite(bounds.dx_hi_nm) &&
                      std::isfinite(bounds.C2D_lo_per_nm2) && std::isfinite(bounds.C2D_hi_per_nm2);
  if (!finite || !(bounds.dx_lo_nm > 0.0) || !(bounds.dx_hi_nm > bounds.dx_lo_nm) ||
      !(bounds.C2D_lo_per_nm2 >= 0.0) || !(bounds.C2D_hi_per_nm2 > bounds.C2D_lo_per_nm2))
    throw ArgumentError("fit_plane: bounds must be finite and ordered");
  check_options(opt);

  const FitModel model{trace, pB, geometry, opt};

  // Coarse scan. The kernel does not depend on C2D, so each dx costs one set
  // of bath integrals.
  const int n_grid = 24;
  const std::vector<double> dxs = logspace(bounds.dx_lo_nm, bounds.dx_hi_nm, n_grid);
  std::vector<double> cs;
  if (bounds.C2D_lo_per_nm2 == 0.0) {
    cs.push_back(0.0);
    const auto tail = logspace(bounds.C2D_hi_per_nm2 * 1e-4, bounds.C2D_hi_per_nm2, n_grid);
    cs.insert(cs.end(), tail.begin(), tail.end());
  } else {
    cs = logspace(bounds.C2D_lo_per_nm2, bounds.C2D_hi_per_nm2, n_grid);
  }
  double best = std::numeric_limits<double>::infinity();
  double dx = dxs.front(), c = cs.front();
  for (double x : dxs) {
    const std::vector<double> k = model.kernel(x);
    for (double cc : cs) {
      const double ssr = model.residuals(k, cc).squaredNorm();
      if (ssr < best) {
        best = ssr;
        dx = x;
        c = cc;
      }
    }
  }

  // Levenberg-Marquardt refinement inside the box.
  std::vector<double> k = model.kernel(dx);
  Eigen::VectorXd r = model.residuals(k, c);
  double ssr = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  for (; it < 100; ++it) {
    const Eigen::MatrixXd j = model.jacobian(dx, c, k);
    const Eigen::Matrix2d jtj = j.transpose() * j;
    const Eigen::Vector2d g = j.transpose() * r;
    bool accepted = false;
    double step_rel = 0.0;
    for (int tries = 0; tries < 20 && !accepted; ++tries) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::Vector2d delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) break;
      const double dx_new = std::clamp(dx + delta(0), bounds.dx_lo_nm, bounds.dx_hi_nm);
      const double c_new = std::clamp(c + delta(1), bounds.C2D_lo_per_nm2, bounds.C2D_hi_per_nm2);
      const std::vector<double> k_new = model.kernel(dx_new);
      const Eigen::VectorXd r_new = model.residuals(k_new, c_new);
      const double ssr_new = r_new.squaredNorm();
      if (ssr_new <= ssr) {
        step_rel = std::max(std::abs(dx_new - dx) / dx,
                            std::abs(c_new - c) / std::max(c, 1e-12 * bounds.C2D_hi_per_nm2));
        dx = dx_new;
        c = c_new;
        k = k_new;
        r = r_new;
        ssr = ssr_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted || step_rel < 1e-10) break;
  }

  FitResult res;
  res.dx_nm = dx;
  res.C2D_per_nm2 = c;
  res.residual = ssr;
  res.iterations = it;

  const auto near = [](double v, double edge, double span) { return std::abs(v - edge) <= 1e-6 * span; };
  const double dx_span = bounds.dx_hi_nm - bounds.dx_lo_nm;
  const double c_span = bounds.C2D_hi_per_nm2 - bounds.C2D_lo_per_nm2;
  res.bound_active = near(dx, bounds.dx_lo_nm, dx_span) || near(dx, bounds.dx_hi_nm, dx_span) ||
                     near(c, bounds.C2D_lo_per_nm2, c_span) || near(c, bounds.C2D_hi_per_nm2, c_span);

  const Eigen::MatrixXd j = model.jacobian(dx, c, k);
  const Eigen::Vector2d norms = j.colwise().norm();
  const double floor = 1e-10 * std::sqrt(static_cast<double>(j.rows()));
  if (norms.minCoeff() <= floor) {
    res.ill_conditioned = true;
  } else {
    const Eigen::MatrixXd scaled = j * norms.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const auto sv = svd.singularValues();
    res.ill_conditioned = sv(1) <= 0.0 || sv(0) / sv(1) > 1e8;
  }
  const auto n = static_cast<double>(j.rows());
  const double sigma2 = n > 2.0 ? ssr / (n - 2.0) : 0.0;
  const Eigen::Matrix2d jtj = j.transpose() * j;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(jtj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector2d inv = Eigen::Vector2d::Zero();
  for (int i = 0; i < 2; ++i)
    if (svd.singularValues()(i) > 1e-14 * svd.singularValues()(0)) inv(i) = 1.0 / svd.singularValues()(i);
  res.covariance = sigma2 * svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return res;
}

double pump_probability(double spectral_fraction, double inversion_efficiency) {
  if (!(spectral_fraction >= 0.0 && spectral_fraction <= 1.0) ||
      !(inversion_efficiency >= 0.0 && inversion_efficiency <= 1.0))
    throw ArgumentError("pump_probability: inputs must lie in [0, 1]");
  return spectral_fraction * inversion_efficiency;
}

}  // namespace sicyig::deer
