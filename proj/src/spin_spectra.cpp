#include "sicyig/spin_spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"
#include "sicyig/numeric.hpp"
#include "sicyig/parallel.hpp"

namespace sicyig::spectra {

using cd = std::complex<double>;
using Eigen::MatrixXcd;

Eigen::Matrix3d EulerAngles::matrix() const {
  using Eigen::AngleAxisd;
  return (AngleAxisd(alpha, Vec3::UnitZ()) * AngleAxisd(beta, Vec3::UnitY()) *
          AngleAxisd(gamma, Vec3::UnitZ()))
      .toRotationMatrix();
}

namespace {

bool is_half_integer(double s) {
  const double two_s = 2.0 * s;
  return two_s >= 1.0 - 1e-12 && std::abs(two_s - std::round(two_s)) < 1e-12;
}

int multiplicity(double s) { return static_cast<int>(std::lround(2.0 * s)) + 1; }

// Sx, Sy, Sz for spin s in the |m = s ... -s> basis.
std::array<MatrixXcd, 3> spin_matrices(double s) {
  const int n = multiplicity(s);
  MatrixXcd sp = MatrixXcd::Zero(n, n);
  MatrixXcd sz = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = s - k;
    sz(k, k) = m;
    if (k > 0) sp(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const MatrixXcd sm = sp.adjoint();
  return {0.5 * (sp + sm), cd(0.0, -0.5) * (sp - sm), sz};
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator `op` acting on factor `slot` of the product space with the given
// multiplicities.
MatrixXcd embed(const MatrixXcd& op, std::size_t slot, const std::vector<int>& dims) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (std::size_t k = 0; k < dims.size(); ++k)
    out = kron(out, k == slot ? op : MatrixXcd::Identity(dims[k], dims[k]));
  return out;
}

// Field-independent part plus Zeeman operator per gauss along a direction.
struct SplitHamiltonian {
  MatrixXcd static_part;
  std::array<MatrixXcd, 3> electron;  // Sx, Sy, Sz in the full space
  Eigen::Matrix3d g_tensor;
};

SplitHamiltonian split_hamiltonian(const SpinSystem& sys, double D_MHz) {
  std::vector<int> dims{multiplicity(sys.spin_S)};
  for (const auto& hf : sys.hyperfine) dims.push_back(multiplicity(hf.nuclear_spin_I));
  SplitHamiltonian h;
  const auto s_local = spin_matrices(sys.spin_S);
  for (int a = 0; a < 3; ++a) h.electron[a] = embed(s_local[a], 0, dims);
  const Eigen::Index n = h.electron[0].rows();
  const double ss1 = sys.spin_S * (sys.spin_S + 1.0);
  h.static_part = D_MHz * (h.electron[2] * h.electron[2] - ss1 / 3.0 * MatrixXcd::Identity(n, n)) +
                  sys.E_MHz * (h.electron[0] * h.electron[0] - h.electron[1] * h.electron[1]);
  for (std::size_t k = 0; k < sys.hyperfine.size(); ++k) {
    const auto& hf = sys.hyperfine[k];
    const auto i_local = spin_matrices(hf.nuclear_spin_I);
    const Eigen::Matrix3d r = hf.frame.matrix();
    const Eigen::Matrix3d a_tensor = r * hf.A_MHz.asDiagonal() * r.transpose();
    std::array<MatrixXcd, 3> nuc;
    for (int b = 0; b < 3; ++b) nuc[b] = embed(i_local[b], k + 1, dims);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (a_tensor(a, b) != 0.0) h.static_part += a_tensor(a, b) * h.electron[a] * nuc[b];
  }
  const Eigen::Matrix3d rg = sys.g_frame.matrix();
  h.g_tensor = rg * sys.g.asDiagonal() * rg.transpose();
  return h;
}

MatrixXcd zeeman_per_gauss(const SplitHamiltonian& h, const Vec3& n) {
  const Vec3 bg = constants::bohr_MHz_per_G * (h.g_tensor.transpose() * n);
  return bg.x() * h.electron[0] + bg.y() * h.electron[1] + bg.z() * h.electron[2];
}

std::pair<Vec3, Vec3> transverse_basis(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = n.cross(seed).normalized();
  return {u, n.cross(u).normalized()};
}

double transition_moment_full(const SplitHamiltonian& h, const MatrixXcd& vectors, int i, int j,
                              const Vec3& n) {
  const auto [u, v] = transverse_basis(n);
  const MatrixXcd su = u.x() * h.electron[0] + u.y() * h.electron[1] + u.z() * h.electron[2];
  const MatrixXcd sv = v.x() * h.electron[0] + v.y() * h.electron[1] + v.z() * h.electron[2];
  const cd mu = vectors.col(i).dot(su * vectors.col(j));
  const cd mv = vectors.col(i).dot(sv * vectors.col(j));
  return 0.5 * (std::norm(mu) + std::norm(mv));
}

constexpr double kMinAmplitude = 1e-6;

}  // namespace

void SpinSystem::validate() const {
  if (!is_half_integer(spin_S)) throw ArgumentError(label + ": 2S must be an integer >= 1");
  if (!(linewidth_G > 0.0)) throw ArgumentError(label + ": linewidth must be positive");
  if ((g.array() <= 0.0).any()) throw ArgumentError(label + ": g values must be positive");
  if (D_MHz != 0.0 && std::abs(E_MHz) > std::abs(D_MHz) / 3.0 + 1e-12)
    throw ArgumentError(label + ": |E| must not exceed |D|/3");
  if (D_sigma_MHz < 0.0) throw ArgumentError(label + ": D spread must be >= 0");
  if (D_sigma_MHz > 0.0 && D_samples < 1) throw ArgumentError(label + ": D_samples must be >= 1");
  for (const auto& hf : hyperfine)
    if (!is_half_integer(hf.nuclear_spin_I))
      throw ArgumentError(label + ": nuclear spin must be a positive half-integer");
}

int SpinSystem::dimension() const {
  int n = multiplicity(spin_S);
  for (const auto& hf : hyperfine) n *= multiplicity(hf.nuclear_spin_I);
  return n;
}

SpinSystem v2_center() {
  SpinSystem s;
  s.label = "V2";
  s.spin_S = 1.5;
  s.g = Vec3::Constant(2.0028);
  s.D_MHz = 35.0;
  s.linewidth_G = 1.0;
  return s;
}

SpinSystem nitroxide() {
  SpinSystem s;
  s.label = "nitroxide";
  s.g = Vec3(2.0089, 2.0061, 2.0027);
  HyperfineCoupling n14;
  n14.nuclear_spin_I = 1.0;
  n14.A_MHz = Vec3(14.0, 14.0, 95.0);
  s.hyperfine.push_back(n14);
  s.linewidth_G = 1.0;
  return s;
}

SpinSystem gadolinium() {
  SpinSystem s;
  s.label = "Gd";
  s.spin_S = 3.5;
  s.g = Vec3::Constant(1.992);
  s.D_MHz = 600.0;
  s.D_sigma_MHz = 200.0;
  s.D_samples = 9;
  s.linewidth_G = 1.0;
  return s;
}

SpinSystem trityl() {
  SpinSystem s;
  s.label = "trityl";
  s.g = Vec3::Constant(2.0026);
  s.linewidth_G = 1.0;
  return s;
}

Lineshape parse_lineshape(const std::string& name) {
  if (name == "gaussian") return Lineshape::gaussian;
  if (name == "lorentzian") return Lineshape::lorentzian;
  throw ArgumentError("unknown lineshape '" + name + "' (expected gaussian or lorentzian)");
}

std::string to_string(Lineshape l) { return l == Lineshape::gaussian ? "gaussian" : "lorentzian"; }

Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, const Vec3& field_G) {
  sys.validate();
  const SplitHamiltonian h = split_hamiltonian(sys, sys.D_MHz);
  const double b = field_G.norm();
  if (b == 0.0) return h.static_part;
  return h.static_part + b * zeeman_per_gauss(h, field_G / b);
}

double transition_moment(const SpinSystem& sys, const Eigen::MatrixXcd& vectors, int i, int j,
                         const Vec3& direction) {
  const SplitHamiltonian h = split_hamiltonian(sys, sys.D_MHz);
  return transition_moment_full(h, vectors, i, j, direction.normalized());
}

std::vector<SpectrumLine> resonance_fields_with_D(const SpinSystem& sys, double D_MHz,
                                                  double freq_GHz, const Vec3& orientation,
                                                  const SweepWindow& w) {
  sys.validate();
  if (!(freq_GHz > 0.0)) throw ArgumentError("resonance_fields: frequency must be positive");
  if (!(w.hi_G > w.lo_G) || !(w.lo_G > 0.0) || !(w.step_G > 0.0))
    throw ArgumentError("resonance_fields: invalid sweep window");
  if (orientation.norm() == 0.0) throw ArgumentError("resonance_fields: zero orientation");
  const Vec3 n = orientation.normalized();
  const SplitHamiltonian h = split_hamiltonian(sys, D_MHz);
  const MatrixXcd hz = zeeman_per_gauss(h, n);
  const double f = freq_GHz * 1000.0;
  const int dim = static_cast<int>(h.static_part.rows());

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
  auto levels = [&](double b) -> Eigen::VectorXd {
    es.compute(h.static_part + b * hz, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  };

  const auto n_steps = static_cast<int>(std::ceil((w.hi_G - w.lo_G) / w.step_G));
  std::vector<SpectrumLine> lines;
  double b_prev = w.lo_G;
  Eigen::VectorXd e_prev = levels(b_prev);
  for (int s = 1; s <= n_steps; ++s) {
    const double b_next = std::min(w.hi_G, w.lo_G + s * w.step_G);
    const Eigen::VectorXd e_next = levels(b_next);
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        const double g0 = e_prev(j) - e_prev(i) - f;
        const double g1 = e_next(j) - e_next(i) - f;
        if ((g0 < 0.0) == (g1 < 0.0)) continue;
        auto gap = [&](double b) {
          const Eigen::VectorXd e = levels(b);
          return e(j) - e(i) - f;
        };
        const double b_res = numeric::bisect(gap, b_prev, b_next, 1e-7);
        es.compute(h.static_part + b_res * hz, Eigen::ComputeEigenvectors);
        const double amp = transition_moment_full(h, es.eigenvectors(), i, j, n);
        if (amp < kMinAmplitude) continue;
        lines.push_back({b_res, amp, i, j, n});
      }
    }
    b_prev = b_next;
    e_prev = e_next;
  }
  std::sort(lines.begin(), lines.end(), [](const SpectrumLine& a, const SpectrumLine& b) {
    return a.resonance_field_G < b.resonance_field_G;
  });
  return lines;
}

std::vector<SpectrumLine> resonance_fields(const SpinSystem& sys, double freq_GHz,
                                           const Vec3& orientation, const SweepWindow& window) {
  return resonance_fields_with_D(sys, sys.D_MHz, freq_GHz, orientation, window);
}

std::vector<Vec3> hemisphere_grid(std::size_t n) {
  std::vector<Vec3> out;
  out.reserve(n);
  const double golden = constants::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = golden * static_cast<double>(i);
    out.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
  }
  return out;
}

std::vector<double> render_lines(const SpinSystem& sys, const std::vector<SpectrumLine>& lines,
                                 const std::vector<double>& grid) {
  std::vector<double> out(grid.size(), 0.0);
  const double w = sys.linewidth_G;
  const double cutoff = sys.lineshape == Lineshape::gaussian ? 6.0 * w : 1e300;
  for (const auto& line : lines) {
    const auto first = std::lower_bound(grid.begin(), grid.end(), line.resonance_field_G - cutoff);
    for (auto it = first; it != grid.end() && *it <= line.resonance_field_G + cutoff; ++it) {
      const double x = (*it - line.resonance_field_G) / w;
      const double shape = sys.lineshape == Lineshape::gaussian
                               ? std::exp(-4.0 * std::log(2.0) * x * x)
                               : 1.0 / (1.0 + 4.0 * x * x);
      out[static_cast<std::size_t>(it - grid.begin())] += line.amplitude * shape;
    }
  }
  return out;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw ArgumentError("spectrum grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ArgumentError("spectrum grid must be strictly increasing");
}

SweepWindow window_for(const SpinSystem& sys, const std::vector<double>& grid) {
  const double pad = sys.lineshape == Lineshape::gaussian ? 6.0 * sys.linewidth_G
                                                          : 200.0 * sys.linewidth_G;
  SweepWindow w;
  w.lo_G = std::max(1.0, grid.front() - pad);
  w.hi_G = std::max(w.lo_G + 1.0, grid.back() + pad);
  w.step_G = 1.0;
  return w;
}

void normalize(std::vector<double>& v) {
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak > 0.0)
    for (double& x : v) x /= peak;
}

}  // namespace

Spectrum powder_spectrum(const SpinSystem& sys, double freq_GHz, const std::vector<double>& grid,
                         std::size_t n_orient) {
  sys.validate();
  check_grid(grid);
  if (n_orient < 50) throw ArgumentError("powder_spectrum: n_orient must be at least 50");
  const SweepWindow w = window_for(sys, grid);
  const std::vector<Vec3> dirs = hemisphere_grid(n_orient);

  numeric::QuadratureRule d_rule{{0.0}, {1.0}};
  if (sys.D_sigma_MHz > 0.0) d_rule = numeric::gauss_hermite_normal(static_cast<std::size_t>(sys.D_samples));

  const std::size_t n_d = d_rule.nodes.size();
  std::vector<std::vector<SpectrumLine>> per_item(n_orient * n_d);
  parallel::parallel_for(per_item.size(), [&](std::size_t idx) {
    const std::size_t o = idx / n_d;
    const std::size_t d = idx % n_d;
    const double D = sys.D_MHz + sys.D_sigma_MHz * d_rule.nodes[d];
    auto lines = resonance_fields_with_D(sys, D, freq_GHz, dirs[o], w);
    for (auto& l : lines) l.amplitude *= d_rule.weights[d];
    per_item[idx] = std::move(lines);
  });

  Spectrum spec;
  spec.field_G = grid;
  spec.intensity.assign(grid.size(), 0.0);
  spec.systems = {sys.label};
  for (const auto& lines : per_item) {
    const std::vector<double> part = render_lines(sys, lines, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) spec.intensity[i] += part[i];
  }
  normalize(spec.intensity);
  return spec;
}

Spectrum oriented_spectrum(const SpinSystem& sys, double freq_GHz, const Vec3& orientation,
                           const std::vector<double>& grid) {
  sys.validate();
  check_grid(grid);
  Spectrum spec;
  spec.field_G = grid;
  spec.systems = {sys.label};
  spec.intensity = render_lines(sys, resonance_fields(sys, freq_GHz, orientation, window_for(sys, grid)), grid);
  normalize(spec.intensity);
  return spec;
}

std::vector<SpectrumLine> shift_lines(std::vector<SpectrumLine> lines,
                                      const magnetostatics::EffectiveShift& shift) {
  for (auto& l : lines) l.resonance_field_G -= shift.total_G;
  return lines;
}

std::vector<SpectrumLine> gradient_shifted_lines(const SpinSystem& sys, double freq_GHz,
                                                 const Vec3& orientation,
                                                 const magnetostatics::EffectiveShift& shift) {
  return shift_lines(resonance_fields(sys, freq_GHz, orientation), shift);
}

double linewidth_from_T2(double T2_us, double g) {
  if (!(T2_us > 0.0)) throw ArgumentError("linewidth_from_T2: T2 must be positive");
  if (!(g > 0.0)) throw ArgumentError("linewidth_from_T2: g must be positive");
  return 1.0 / (g * constants::bohr_MHz_per_G * T2_us);
}

double depth_resolution(double linewidth_G, double gradient_G_per_nm) {
  if (gradient_G_per_nm == 0.0)
    throw DomainError("depth_resolution: zero gradient gives no spatial encoding");
  if (gradient_G_per_nm < 0.0) throw ArgumentError("depth_resolution: gradient must be positive");
  if (linewidth_G < 0.0) throw ArgumentError("depth_resolution: negative linewidth");
  return 10.0 * linewidth_G / gradient_G_per_nm;
}

namespace {

// Integral of the piecewise-linear spectrum over [lo, hi].
double integrate_window(const Spectrum& spec, double lo, double hi) {
  const auto& x = spec.field_G;
  const auto& y = spec.intensity;
  lo = std::max(lo, x.front());
  hi = std::min(hi, x.back());
  if (!(hi > lo)) return 0.0;
  auto interp = [&](double b) {
    const auto it = std::upper_bound(x.begin(), x.end(), b);
    if (it == x.end()) return y.back();
    if (it == x.begin()) return y.front();
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double t = (b - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
  };
  std::vector<double> xs{lo};
  std::vector<double> ys{interp(lo)};
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > lo && x[i] < hi) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  xs.push_back(hi);
  ys.push_back(interp(hi));
  return numeric::trapezoid(xs, ys);
}

}  // namespace

double spectral_fraction(const Spectrum& spec, double lo_G, double hi_G) {
  check_grid(spec.field_G);
  if (spec.intensity.size() != spec.field_G.size())
    throw ArgumentError("spectral_fraction: intensity/grid size mismatch");
  if (hi_G < lo_G) throw ArgumentError("spectral_fraction: window upper edge below lower edge");
  if (hi_G < spec.field_G.front() || lo_G > spec.field_G.back())
    throw ArgumentError("spectral_fraction: window does not overlap the grid");
  const double total = numeric::trapezoid(spec.field_G, spec.intensity);
  if (!(total > 0.0)) throw DomainError("spectral_fraction: spectrum has zero total intensity");
  return std::clamp(integrate_window(spec, lo_G, hi_G) / total, 0.0, 1.0);
}

std::pair<double, double> frequency_window_to_field(double f_lo_GHz, double f_hi_GHz,
                                                    double mw_freq_GHz, double observe_field_G,
                                                    double g) {
  if (!(f_hi_GHz >= f_lo_GHz)) throw ArgumentError("frequency window upper edge below lower edge");
  const double gb = g * constants::bohr_MHz_per_G;
  // A spin with carrier resonance field Br precesses at f_mw + g beta (B_obs - Br).
  const double lo = observe_field_G - (f_hi_GHz - mw_freq_GHz) * 1000.0 / gb;
  const double hi = observe_field_G - (f_lo_GHz - mw_freq_GHz) * 1000.0 / gb;
  return {lo, hi};
}

}  // namespace sicyig::spectra
