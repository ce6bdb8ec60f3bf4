#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sicyig::numeric {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Hermite rule for the standard normal weight exp(-x^2/2)/sqrt(2 pi);
/// weights sum to one.
QuadratureRule gauss_hermite_normal(std::size_t n);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 64, std::size_t order = 8);

/// Trapezoid integral of samples y over strictly increasing x.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Golden-section search for the maximum of a unimodal f on [a, b].
/// Returns the abscissa; stops when the bracket is narrower than tol.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol);

/// Bisection root of f on [a, b] where f(a) and f(b) have opposite signs.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol,
              int max_iter = 200);

/// Evenly spaced grid of n points including both ends.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace sicyig::numeric
