#include "lpmhd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lpmhd/error.hpp"

namespace lpmhd {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace {

struct Adaptive {
  const std::function<double(double)>& f;
  GaussRule lo = gauss_legendre(10);
  GaussRule hi = gauss_legendre(20);
  double rel_tol;
  int max_depth;
  QuadratureResult result;

  double apply(const GaussRule& r, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
    result.evaluations += static_cast<int>(r.nodes.size());
    return half * sum;
  }

  double panel(double a, double b, double scale, int depth) {
    const double coarse = apply(lo, a, b);
    const double fine = apply(hi, a, b);
    const double err = std::abs(fine - coarse);
    if (!std::isfinite(fine)) throw QuadratureError("integrate_geometric: non-finite integrand");
    if (err <= rel_tol * std::max(scale, std::abs(fine))) {
      result.error_estimate += err;
      ++result.panels;
      return fine;
    }
    if (depth >= max_depth) {
      std::ostringstream msg;
      msg << "integrate_geometric: panel [" << a << ", " << b << "] did not converge (estimate " << fine
          << ", difference " << err << ")";
      throw QuadratureError(msg.str());
    }
    const double m = 0.5 * (a + b);
    return panel(a, m, scale, depth + 1) + panel(m, b, scale, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_geometric(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                     double ratio, int max_depth) {
  if (!(a > 0.0) || !(b > a)) throw ParameterError("integrate_geometric: need 0 < a < b");
  if (!(ratio > 1.0)) throw ParameterError("integrate_geometric: panel ratio must exceed 1");
  Adaptive ad{f, gauss_legendre(10), gauss_legendre(20), rel_tol, max_depth, {}};
  double total = 0.0;
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, lo * ratio);
    total += ad.panel(lo, hi, std::abs(total), 0);
    lo = hi;
  }
  ad.result.value = total;
  return ad.result;
}

}  // namespace lpmhd
