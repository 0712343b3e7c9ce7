#pragma once

#include <functional>
#include <vector>

namespace schlafli {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (Newton iteration on P_n, accurate to ~1e-15).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss–Legendre on [a, b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int points = 16, int panels = 1);

/// Composite Simpson on [a, b] with an even number of intervals.
double integrate_simpson(const std::function<double(double)>& f, double a, double b, int intervals);

}  // namespace schlafli
