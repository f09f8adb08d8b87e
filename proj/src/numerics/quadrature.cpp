#include "metricdft/numerics/quadrature.hpp"

#include "metricdft/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace metricdft::numerics {

namespace {

constexpr int kMaxNewton = 100;

QuadratureRule1D legendre_rule(int n) {
  QuadratureRule1D rule;
  rule.kind = WeightKind::legendre;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalError("gauss_rule: Legendre Newton iteration did not "
                           "converge for polynomial order " +
                           std::to_string(n));
    // one more derivative evaluation at the converged root
    double p1 = 1.0, p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule1D laguerre_rule(int n, int alpha) {
  if (alpha < 0 || alpha > 2)
    throw ContractViolation("gauss_rule: Laguerre alpha must be 0, 1 or 2");
  QuadratureRule1D rule;
  rule.kind = WeightKind::laguerre;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double a = alpha;
  const double log_norm = std::lgamma(a + n) - std::lgamma(static_cast<double>(n));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = (1.0 + a) * (3.0 + 0.92 * a) / (1.0 + 2.4 * n + 1.8 * a);
    } else if (i == 1) {
      z += (15.0 + 6.25 * a) / (1.0 + 0.9 * a + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * a / (1.0 + 3.5 * ai)) *
           (z - rule.nodes[i - 2]) / (1.0 + 0.3 * a);
    }
    bool converged = false;
    double p1 = 0.0, p2 = 0.0, pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0 + a - z) * p2 - (j + a) * p3) / (j + 1.0);
      }
      pp = (n * p1 - (n + a) * p2) / z;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-13 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalError("gauss_rule: Laguerre Newton iteration did not "
                           "converge for polynomial order " +
                           std::to_string(n));
    p1 = 1.0;
    p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0 + a - z) * p2 - (j + a) * p3) / (j + 1.0);
    }
    pp = (n * p1 - (n + a) * p2) / z;
    z -= p1 / pp;
    rule.nodes[i] = z;
    rule.weights[i] = -std::exp(log_norm) / (pp * n * p2);
  }
  // Newton from the asymptotic guesses can land two guesses on one root for
  // large n; that shows up as a non-increasing node sequence.
  for (int i = 1; i < n; ++i)
    if (!(rule.nodes[i] > rule.nodes[i - 1]))
      throw NumericalError("gauss_rule: Laguerre roots collided for polynomial "
                           "order " +
                           std::to_string(n));
  return rule;
}

} // namespace

QuadratureRule1D gauss_rule(WeightKind kind, int n, int alpha) {
  if (n < 1)
    throw ContractViolation("gauss_rule: need at least one point");
  if (kind == WeightKind::legendre) {
    if (n == 1) {
      QuadratureRule1D r;
      r.nodes = {0.0};
      r.weights = {2.0};
      return r;
    }
    return legendre_rule(n);
  }
  return laguerre_rule(n, alpha);
}

const QuadratureRule1D &gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, gauss_rule(WeightKind::legendre, n)).first;
  return it->second;
}

void append_mapped(const QuadratureRule1D &rule, double a, double b,
                   std::vector<double> &nodes, std::vector<double> &weights) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    nodes.push_back(mid + half * rule.nodes[i]);
    weights.push_back(half * rule.weights[i]);
  }
}

PanelQuadrature::PanelQuadrature(std::vector<double> b, int n)
    : breaks(std::move(b)), order(n) {
  require(breaks.size() >= 2, "PanelQuadrature: need at least one panel");
  const auto &rule = gauss_legendre(order);
  nodes.reserve(panels() * order);
  weights.reserve(panels() * order);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    require(breaks[p + 1] > breaks[p], "PanelQuadrature: breaks must increase");
    append_mapped(rule, breaks[p], breaks[p + 1], nodes, weights);
  }
}

std::vector<double> geometric_breaks(double inner, double outer, double ratio) {
  require(inner > 0.0 && outer > inner && ratio > 1.0,
          "geometric_breaks: need 0 < inner < outer and ratio > 1");
  std::vector<double> b{0.0};
  for (double x = inner; x < outer; x *= ratio)
    b.push_back(x);
  if (outer / b.back() < std::sqrt(ratio) && b.size() > 2)
    b.back() = outer;
  else
    b.push_back(outer);
  return b;
}

} // namespace metricdft::numerics
