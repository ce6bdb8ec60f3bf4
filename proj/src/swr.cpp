#include "sicyig/swr.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sicyig/errors.hpp"
#include "sicyig/parallel.hpp"

namespace sicyig::swr {

using magnetostatics::StripeGeometry;

void SwrModel::validate() const {
  geom.validate();
  if (n_grid < 64) throw ArgumentError("swr: n_grid must be at least 64");
  if (!(exchange_D_G_nm2 >= 0.0)) throw ArgumentError("swr: exchange stiffness must be >= 0");
  if (!(gyromag_MHz_per_G > 0.0)) throw ArgumentError("swr: gyromagnetic ratio must be positive");
  if (max_modes < 1) throw ArgumentError("swr: max_modes must be positive");
}

Boundary parse_boundary(const std::string& name) {
  if (name == "free") return Boundary::free;
  if (name == "pinned") return Boundary::pinned;
  throw ArgumentError("swr: unknown boundary '" + name + "' (expected free or pinned)");
}

std::string to_string(Boundary b) { return b == Boundary::free ? "free" : "pinned"; }

namespace {

double spacing(const SwrModel& m) {
  const double w = m.geom.width_nm;
  return m.boundary == Boundary::free ? w / m.n_grid : w / (m.n_grid + 1);
}

}  // namespace

std::vector<double> grid_nodes(const SwrModel& m) {
  const double h = spacing(m);
  const double offset = m.boundary == Boundary::free ? 0.5 : 1.0;
  std::vector<double> z(static_cast<std::size_t>(m.n_grid));
  for (int i = 0; i < m.n_grid; ++i) z[static_cast<std::size_t>(i)] = -0.5 * m.geom.width_nm + (i + offset) * h;
  return z;
}

InternalFieldProfile internal_field_profile(const SwrModel& m, double b0_G) {
  m.validate();
  InternalFieldProfile p;
  p.z_nm = grid_nodes(m);
  p.b_int_G.reserve(p.z_nm.size());
  for (double z : p.z_nm) {
    const double demag = m.include_demag ? magnetostatics::demag_factor_zz(m.geom, z) : 0.0;
    const double b = b0_G - demag * m.geom.b_sat_G;
    if (b <= 0.0) p.unsaturated = true;
    p.b_int_G.push_back(b);
  }
  return p;
}

InternalFieldProfile internal_field_profile(const StripeGeometry& geom, double b0_G, int n_grid) {
  SwrModel m;
  m.geom = geom;
  m.n_grid = n_grid;
  return internal_field_profile(m, b0_G);
}

ModeSet modes(const SwrModel& m, double b0_G, int n_modes, bool with_vectors) {
  const InternalFieldProfile prof = internal_field_profile(m, b0_G);
  const auto n = static_cast<Eigen::Index>(m.n_grid);
  const double h = spacing(m);
  const double c = m.gyromag_MHz_per_G * m.exchange_D_G_nm2 / (h * h);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b = std::max(0.0, prof.b_int_G[static_cast<std::size_t>(i)]);
    diag(i) = m.gyromag_MHz_per_G * std::sqrt(b * (b + m.geom.b_sat_G)) + 2.0 * c;
  }
  if (m.boundary == Boundary::free) {
    // Zero-flux ends on the cell-centered grid.
    diag(0) -= c;
    diag(n - 1) -= c;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub,
                            with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("swr: tridiagonal eigen-solver failed at B0 = " + std::to_string(b0_G));
  ModeSet out;
  const Eigen::Index k = std::min<Eigen::Index>(n, n_modes);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.freq_MHz.push_back(es.eigenvalues()(j));
    if (with_vectors) {
      const Eigen::VectorXd v = es.eigenvectors().col(j);
      out.vectors.emplace_back(v.data(), v.data() + v.size());
    }
  }
  return out;
}

double oscillator_strength(const SwrModel& m, const std::vector<double>& psi) {
  // |int psi dz|^2 / (W int |psi|^2 dz): one for the uniform profile, and the
  // sum over a complete mode set does not exceed one.
  const double h = spacing(m);
  double s = 0.0, norm = 0.0;
  for (double v : psi) {
    s += v;
    norm += v * v;
  }
  if (norm <= 0.0) return 0.0;
  return h * s * s / (m.geom.width_nm * norm);
}

double edge_weight(const SwrModel& m, const std::vector<double>& psi) {
  const std::vector<double> z = grid_nodes(m);
  const double limit = 0.5 * m.geom.width_nm - m.geom.width_nm / 8.0;
  double edge = 0.0, total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = psi[i] * psi[i];
    total += w;
    if (std::abs(z[i]) > limit) edge += w;
  }
  return total > 0.0 ? edge / total : 0.0;
}

std::vector<SwrLine> swr_lines(const SwrModel& m, double drive_freq_GHz, double lo, double hi,
                               double step) {
  m.validate();
  if (!(lo > 0.0) || !(hi > lo) || !(step > 0.0))
    throw ArgumentError("swr_lines: scan interval must be positive and non-empty");
  const double f = drive_freq_GHz * 1000.0;
  const auto n_b = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<std::vector<double>> freqs(n_b);
  parallel::parallel_for(n_b, [&](std::size_t i) {
    freqs[i] = modes(m, lo + step * static_cast<double>(i), m.max_modes, false).freq_MHz;
  });

  std::vector<SwrLine> lines;
  for (std::size_t i = 0; i + 1 < n_b; ++i) {
    const std::size_t k = std::min(freqs[i].size(), freqs[i + 1].size());
    for (std::size_t mode = 0; mode < k; ++mode) {
      const double s0 = freqs[i][mode] - f;
      const double s1 = freqs[i + 1][mode] - f;
      if ((s0 < 0.0) != (s1 < 0.0)) {
        const double b0 = lo + step * static_cast<double>(i);
        SwrLine line;
        line.mode_index = static_cast<int>(mode);
        line.resonance_field_G = b0 - s0 * step / (s1 - s0);
        const ModeSet at = modes(m, line.resonance_field_G, static_cast<int>(mode) + 1, true);
        const std::vector<double>& psi = at.vectors[mode];
        line.oscillator_strength = oscillator_strength(m, psi);
        line.edge_weight = edge_weight(m, psi);
        line.edge_localized = line.edge_weight > 0.6;
        lines.push_back(line);
      }
    }
  }
  std::sort(lines.begin(), lines.end(), [](const SwrLine& a, const SwrLine& b) {
    return a.resonance_field_G < b.resonance_field_G;
  });
  return lines;
}

std::vector<DispersionPoint> dispersion_map(const SwrModel& m, double lo, double hi, double step,
                                            int n_modes) {
  m.validate();
  if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0))
    throw ArgumentError("dispersion_map: scan interval must be positive");
  const auto n_b = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<std::vector<double>> freqs(n_b);
  parallel::parallel_for(n_b, [&](std::size_t i) {
    freqs[i] = modes(m, lo + step * static_cast<double>(i), n_modes, false).freq_MHz;
  });
  std::vector<DispersionPoint> out;
  for (std::size_t i = 0; i < n_b; ++i)
    for (std::size_t j = 0; j < freqs[i].size(); ++j)
      out.push_back({lo + step * static_cast<double>(i), static_cast<int>(j), freqs[i][j] / 1000.0});
  return out;
}

OverlapReport overlap_check(const std::vector<SwrLine>& swr, const std::vector<EprLine>& epr,
                            double swr_linewidth_G) {
  if (swr.empty() || epr.empty())
    throw ArgumentError("overlap_check: both line lists must be non-empty");
  OverlapReport r;
  r.min_distance_G = std::numeric_limits<double>::infinity();
  for (const SwrLine& s : swr) {
    for (const EprLine& e : epr) {
      const double d = std::abs(s.resonance_field_G - e.field_G) -
                       0.5 * (swr_linewidth_G + e.linewidth_G);
      r.pairs.push_back({s.resonance_field_G, e.field_G, d});
      r.min_distance_G = std::min(r.min_distance_G, d);
    }
  }
  r.pass = r.min_distance_G >= 0.0;
  return r;
}

}  // namespace sicyig::swr
