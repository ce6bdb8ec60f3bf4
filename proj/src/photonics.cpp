#include "sicyig/photonics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/parallel.hpp"

namespace sicyig::photonics {

using constants::pi;

void PhcLattice::validate() const {
  if (!(a_nm > 0.0)) throw ArgumentError("phc: lattice constant must be positive");
  if (!(r_over_a > 0.0 && r_over_a < 0.5) && r_over_a != 0.0)
    throw ArgumentError("phc: r/a must lie in (0, 0.5)");
  if (!(eps_background >= 1.0) || !(eps_hole >= 1.0)) throw ArgumentError("phc: permittivities must be >= 1");
}

double PhcLattice::fill_factor() const { return 2.0 * pi / std::sqrt(3.0) * r_over_a * r_over_a; }

namespace {

const Eigen::Vector2d b1(2.0 * pi, -2.0 * pi / std::sqrt(3.0));
const Eigen::Vector2d b2(0.0, 4.0 * pi / std::sqrt(3.0));

}  // namespace

KPath k_path(std::size_t points_per_segment) {
  if (points_per_segment < 1) throw ArgumentError("k_path: need at least one interval per segment");
  const Eigen::Vector2d gamma(0.0, 0.0);
  const Eigen::Vector2d K(4.0 * pi / 3.0, 0.0);
  const Eigen::Vector2d M(pi, pi / std::sqrt(3.0));
  struct Leg {
    const char* name;
    Eigen::Vector2d from, to;
    const char* label;
  };
  const Leg legs[] = {{"Gamma-K", gamma, K, "Gamma"}, {"K-M", K, M, "K"}, {"M-Gamma", M, gamma, "M"}};
  KPath path;
  const std::size_t n = points_per_segment;
  for (const Leg& leg : legs) {
    const std::size_t first = path.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      path.points.push_back({leg.from + t * (leg.to - leg.from), i == 0 ? leg.label : ""});
    }
    path.segments.push_back({leg.name, first, first + n});
  }
  path.points.push_back({gamma, "Gamma"});
  return path;
}

std::vector<Eigen::Vector2d> reciprocal_set(std::size_t n_pw) {
  if (n_pw < 1) throw ArgumentError("reciprocal_set: need at least one plane wave");
  const int N = static_cast<int>(std::sqrt(static_cast<double>(n_pw))) + 6;
  std::vector<Eigen::Vector2d> all;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n) all.push_back(m * b1 + n * b2);
  std::stable_sort(all.begin(), all.end(),
                   [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.norm() < b.norm(); });
  const double cut = all[n_pw - 1].norm() + 1e-9;
  std::vector<Eigen::Vector2d> out;
  for (const auto& g : all) {
    if (g.norm() > cut) break;
    out.push_back(g);
  }
  return out;
}

double epsilon_fourier(const PhcLattice& lat, const Eigen::Vector2d& G) {
  const double f = lat.fill_factor();
  const double g = G.norm();
  if (g < 1e-12) return f * lat.eps_hole + (1.0 - f) * lat.eps_background;
  if (lat.r_over_a == 0.0) return 0.0;
  const double x = g * lat.r_over_a;
  return (lat.eps_hole - lat.eps_background) * 2.0 * f * std::cyl_bessel_j(1.0, x) / x;
}

BandDiagram tm_bands(const PhcLattice& lat, const KPath& path, std::size_t n_pw, std::size_t n_bands) {
  lat.validate();
  if (n_pw < 169) throw ArgumentError("tm_bands: need at least 169 plane waves");
  if (n_bands < 1) throw ArgumentError("tm_bands: need at least one band");
  if (path.points.empty()) throw ArgumentError("tm_bands: empty k path");
  const std::vector<Eigen::Vector2d> G = reciprocal_set(n_pw);
  const auto n = static_cast<Eigen::Index>(G.size());
  if (static_cast<std::size_t>(n) < n_bands) throw ArgumentError("tm_bands: more bands than plane waves");

  Eigen::MatrixXd eps(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) eps(i, j) = epsilon_fourier(lat, G[i] - G[j]);
  const Eigen::MatrixXd eta = eps.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  if (!eta.allFinite()) throw NumericalError("tm_bands: permittivity matrix is singular");

  BandDiagram diag;
  diag.path = path;
  diag.n_planewaves = G.size();
  diag.bands.resize(static_cast<Eigen::Index>(path.points.size()), static_cast<Eigen::Index>(n_bands));
  parallel::parallel_for(path.points.size(), [&](std::size_t ik) {
    const Eigen::Vector2d& k = path.points[ik].k;
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q(i) = (k + G[i]).norm();
    const Eigen::MatrixXd op = q.asDiagonal() * eta * q.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("tm_bands: eigensolver failed at k index " + std::to_string(ik) + " (" +
                           std::to_string(k.x()) + ", " + std::to_string(k.y()) + ")");
    for (std::size_t b = 0; b < n_bands; ++b) {
      const double w2 = std::max(0.0, es.eigenvalues()(static_cast<Eigen::Index>(b)));
      diag.bands(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(b)) = std::sqrt(w2) / (2.0 * pi);
    }
  });
  return diag;
}

std::vector<GapReport> find_gaps(const BandDiagram& diag, const std::optional<std::string>& segment,
                                 double max_freq, double min_width) {
  std::size_t first = 0;
  std::size_t last = static_cast<std::size_t>(diag.bands.rows()) - 1;
  if (diag.bands.rows() == 0) return {};
  if (segment) {
    auto it = std::find_if(diag.path.segments.begin(), diag.path.segments.end(),
                           [&](const Segment& s) { return s.name == *segment; });
    if (it == diag.path.segments.end()) throw ArgumentError("find_gaps: unknown segment '" + *segment + "'");
    first = it->first;
    last = it->last;
  }
  const auto rows = static_cast<Eigen::Index>(last - first + 1);
  const auto block = diag.bands.middleRows(static_cast<Eigen::Index>(first), rows);
  std::vector<GapReport> out;
  for (Eigen::Index b = 0; b + 1 < block.cols(); ++b) {
    const double lo = block.col(b).maxCoeff();
    const double hi = block.col(b + 1).minCoeff();
    if (hi - lo < min_width || hi > max_freq) continue;
    GapReport g;
    g.kind = segment ? "partial" : "complete";
    g.segment = segment.value_or("");
    g.lower_band = static_cast<std::size_t>(b) + 1;
    g.lower_edge = lo;
    g.upper_edge = hi;
    g.center = 0.5 * (lo + hi);
    g.width = hi - lo;
    out.push_back(g);
  }
  return out;
}

LatticeDesign lattice_from_zpl(double lambda_zpl_nm, double omega_norm, double r_over_a) {
  if (!(lambda_zpl_nm > 0.0) || !(omega_norm > 0.0) || !(r_over_a > 0.0))
    throw ArgumentError("lattice_from_zpl: inputs must be positive");
  const double a = lambda_zpl_nm * omega_norm;
  const double a_drawn = std::round(a);
  return {a, 2.0 * r_over_a * a, a_drawn, 2.0 * std::round(r_over_a * a_drawn)};
}

std::vector<NanobeamWidth> nanobeam_widths(double lambda_zpl_nm, int max_m) {
  if (max_m < 1) throw ArgumentError("nanobeam_widths: max_m must be >= 1");
  if (!(lambda_zpl_nm > 0.0)) throw ArgumentError("nanobeam_widths: wavelength must be positive");
  std::vector<NanobeamWidth> out;
  for (int m = 1; m <= max_m; ++m) out.push_back({m, m * lambda_zpl_nm / 2.0, m % 2 == 1});
  return out;
}

std::optional<NanobeamWidth> select_nanobeam(const std::vector<NanobeamWidth>& widths, double stripe_width_nm) {
  for (const auto& w : widths)
    if (w.has_center_antinode && w.width_nm > stripe_width_nm) return w;
  return std::nullopt;
}

}  // namespace sicyig::photonics
