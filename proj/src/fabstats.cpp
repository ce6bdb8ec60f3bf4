#include "sicyig/fabstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sicyig/constants.hpp"
#include "sicyig/errors.hpp"

namespace sicyig::fabstats {

void ImplantProfile::validate() const {
  if (depth_nm.size() != density_per_nm.size())
    throw ArgumentError("profile: depth and density arrays differ in length");
  if (depth_nm.size() < 2) throw ArgumentError("profile: need at least two points");
  for (std::size_t i = 1; i < depth_nm.size(); ++i)
    if (!(depth_nm[i] > depth_nm[i - 1]))
      throw ParseError("profile: depth values must be strictly increasing");
  for (double d : density_per_nm)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ArgumentError("profile: densities must be finite and >= 0");
}

double ImplantProfile::integral(double z1_nm, double z2_nm) const {
  const double lo = std::max(z1_nm, depth_min());
  const double hi = std::min(z2_nm, depth_max());
  if (!(hi > lo)) return 0.0;
  const auto value_at = [this](double z) {
    auto it = std::upper_bound(depth_nm.begin(), depth_nm.end(), z);
    std::size_t i = it == depth_nm.end() ? depth_nm.size() - 1 : static_cast<std::size_t>(it - depth_nm.begin());
    if (i == 0) i = 1;
    const double t = (z - depth_nm[i - 1]) / (depth_nm[i] - depth_nm[i - 1]);
    return density_per_nm[i - 1] + t * (density_per_nm[i] - density_per_nm[i - 1]);
  };
  double sum = 0.0;
  double z_prev = lo;
  double f_prev = value_at(lo);
  for (std::size_t i = 0; i < depth_nm.size(); ++i) {
    if (depth_nm[i] <= lo) continue;
    if (depth_nm[i] >= hi) break;
    sum += 0.5 * (f_prev + density_per_nm[i]) * (depth_nm[i] - z_prev);
    z_prev = depth_nm[i];
    f_prev = density_per_nm[i];
  }
  sum += 0.5 * (f_prev + value_at(hi)) * (hi - z_prev);
  return sum;
}

double ImplantProfile::total() const { return integral(depth_min(), depth_max()); }

void ApertureSpec::validate() const {
  if (!(diameter_nm > 0.0)) throw ArgumentError("aperture: diameter must be positive");
  if (!(dose_per_cm2 > 0.0)) throw ArgumentError("aperture: dose must be positive");
  if (!(decimation > 0.0 && decimation <= 1.0)) throw ArgumentError("aperture: decimation must lie in (0, 1]");
}

double ApertureSpec::area_nm2() const { return constants::pi * 0.25 * diameter_nm * diameter_nm; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ImplantProfile parse_profile_text(const std::string& text, const std::string& source) {
  ImplantProfile p;
  p.source = source;
  double depth_scale = 1.0;    // to nm
  double density_scale = 1.0;  // to per nm
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(body.substr(0, colon));
      const std::string value = trim(body.substr(colon + 1));
      if (key == "depth_unit") {
        if (value == "nm") depth_scale = 1.0;
        else if (value == "angstrom") depth_scale = 0.1;
        else throw ParseError("profile: unknown depth_unit '" + value + "'", lineno);
      } else if (key == "density_unit") {
        if (value == "per_nm") density_scale = 1.0;
        else if (value == "per_angstrom") density_scale = 10.0;
        else throw ParseError("profile: unknown density_unit '" + value + "'", lineno);
      } else if (key == "vacancies_per_ion") {
        try {
          p.declared_vacancies_per_ion = std::stod(value);
        } catch (const std::exception&) {
          throw ParseError("profile: bad vacancies_per_ion value '" + value + "'", lineno);
        }
      }
      continue;
    }
    std::istringstream row(t);
    double z = 0.0, d = 0.0;
    std::string extra;
    if (!(row >> z >> d) || (row >> extra))
      throw ParseError("profile: malformed row '" + t + "' in " + source, lineno);
    if (!std::isfinite(z) || !std::isfinite(d) || d < 0.0)
      throw ParseError("profile: invalid value in row '" + t + "'", lineno);
    if (!p.depth_nm.empty() && !(z * depth_scale > p.depth_nm.back()))
      throw ParseError("profile: depth not strictly increasing in " + source, lineno);
    p.depth_nm.push_back(z * depth_scale);
    p.density_per_nm.push_back(d * density_scale);
  }
  if (p.depth_nm.size() < 2) throw ParseError("profile: need at least two data rows in " + source);
  p.validate();
  return p;
}

ImplantProfile parse_profile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open profile " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_profile_text(ss.str(), path);
}

Window parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ArgumentError("window must look like z1:z2, got '" + s + "'");
  try {
    std::size_t used = 0;
    Window w{std::stod(s.substr(0, colon), &used), 0.0};
    const std::string rest = s.substr(colon + 1);
    w.z2_nm = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(rest);
    if (!(w.z2_nm >= w.z1_nm)) throw ArgumentError("window: z2 must be >= z1");
    return w;
  } catch (const std::logic_error&) {
    throw ArgumentError("window must look like z1:z2, got '" + s + "'");
  }
}

double expected_count(const ImplantProfile& profile, const ApertureSpec& ap,
                      std::optional<Window> window, std::string* warning) {
  profile.validate();
  ap.validate();
  double vacancies = profile.total();
  if (window) {
    if (window->z2_nm < window->z1_nm) throw ArgumentError("expected_count: window z2 < z1");
    if (window->z2_nm <= profile.depth_min() || window->z1_nm >= profile.depth_max()) {
      if (warning)
        *warning = "depth window lies outside the profile support [" + std::to_string(profile.depth_min()) +
                   ", " + std::to_string(profile.depth_max()) + "] nm";
      return 0.0;
    }
    vacancies = profile.integral(window->z1_nm, window->z2_nm);
  }
  const double dose_per_nm2 = ap.dose_per_cm2 / constants::cm2_to_nm2;
  return dose_per_nm2 * ap.area_nm2() * ap.decimation * vacancies;
}

double poisson_pmf(double lambda, int k) {
  if (!(lambda >= 0.0)) throw ArgumentError("poisson: lambda must be >= 0");
  if (k < 0) return 0.0;
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

std::vector<HistogramBin> poisson_histogram(double lambda, double n_devices, double tail) {
  if (!(lambda >= 0.0)) throw ArgumentError("poisson_histogram: lambda must be >= 0");
  if (!(n_devices >= 0.0)) throw ArgumentError("poisson_histogram: device count must be >= 0");
  if (!(tail > 0.0 && tail < 1.0)) throw ArgumentError("poisson_histogram: tail must lie in (0, 1)");
  std::vector<HistogramBin> out;
  double cumulative = 0.0;
  for (int k = 0;; ++k) {
    const double p = poisson_pmf(lambda, k);
    cumulative += p;
    const double e = n_devices * p;
    out.push_back({k, p, e, std::lround(e)});
    if (cumulative >= 1.0 - tail || k > 100000) break;
  }
  return out;
}

double depth_window_probability(const ImplantProfile& profile, double z1_nm, double z2_nm) {
  profile.validate();
  if (z2_nm < z1_nm) throw ArgumentError("depth_window_probability: z2 < z1");
  const double total = profile.total();
  if (!(total > 0.0)) throw DomainError("depth_window_probability: profile integrates to zero");
  return profile.integral(z1_nm, z2_nm) / total;
}

double usable_yield(double lambda, double p_window, double n_devices) {
  if (!(p_window >= 0.0 && p_window <= 1.0)) throw ArgumentError("usable_yield: P_window must lie in [0, 1]");
  if (!(n_devices >= 0.0)) throw ArgumentError("usable_yield: device count must be >= 0");
  return n_devices * poisson_pmf(lambda, 1) * p_window;
}

}  // namespace sicyig::fabstats
