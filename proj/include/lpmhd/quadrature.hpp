#pragma once

#include <functional>
#include <vector>

namespace lpmhd {

struct GaussRule {
  std::vector<double> nodes;    // on [−1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  int panels = 0;
};

/// ∫_a^b f on panels [a ρ^i, a ρ^{i+1}] (a > 0, geometric toward a), each
/// refined by bisection until the 10- and 20-point Gauss values agree to
/// rel_tol relative to the running total. Throws QuadratureError when a
/// panel fails to settle within max_depth bisections.
QuadratureResult integrate_geometric(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                     double ratio = 2.0, int max_depth = 30);

}  // namespace lpmhd
