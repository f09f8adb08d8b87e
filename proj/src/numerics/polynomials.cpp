#include "metricdft/numerics/polynomials.hpp"

#include "metricdft/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace metricdft::numerics {

namespace {

double laguerre_any(int n, double alpha, double x) {
  if (n == 0)
    return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next =
        ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void check_laguerre_args(int n, int alpha, double x) {
  if (n < 0)
    throw ContractViolation("laguerre_gen: negative order " + std::to_string(n));
  if (alpha < 0 || alpha > 2)
    throw ContractViolation("laguerre_gen: alpha must be 0, 1 or 2, got " +
                            std::to_string(alpha));
  if (!(x >= 0.0))
    throw ContractViolation("laguerre_gen: x must be non-negative");
}

} // namespace

double laguerre_gen(int n, int alpha, double x) {
  check_laguerre_args(n, alpha, x);
  return laguerre_any(n, alpha, x);
}

double laguerre_gen_derivative(int n, int alpha, double x) {
  check_laguerre_args(n, alpha, x);
  if (n == 0)
    return 0.0;
  return -laguerre_any(n - 1, alpha + 1.0, x);
}

void laguerre_table(double alpha, double x, std::span<double> out) {
  if (out.empty())
    return;
  out[0] = 1.0;
  if (out.size() == 1)
    return;
  out[1] = 1.0 + alpha - x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] =
        ((2.0 * kk + 1.0 + alpha - x) * out[k] - (kk + alpha) * out[k - 1]) /
        (kk + 1.0);
  }
}

double legendre(int k, double t) {
  if (k < 0)
    throw ContractViolation("legendre: negative order");
  if (!(std::abs(t) <= 1.0))
    throw ContractViolation("legendre: |t| > 1");
  std::vector<double> p(static_cast<std::size_t>(k) + 1);
  legendre_table(t, p);
  return p.back();
}

double legendre_derivative(int k, double t) {
  if (k < 0)
    throw ContractViolation("legendre_derivative: negative order");
  if (!(std::abs(t) <= 1.0))
    throw ContractViolation("legendre_derivative: |t| > 1");
  std::vector<double> p(static_cast<std::size_t>(k) + 1), dp(p.size());
  legendre_table(t, p, dp);
  return dp.back();
}

void legendre_table(double t, std::span<double> p, std::span<double> dp,
                    std::span<double> d2p) {
  const std::size_t n = p.size();
  if (n == 0)
    return;
  p[0] = 1.0;
  if (n > 1)
    p[1] = t;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    p[k + 1] = ((2.0 * kk + 1.0) * t * p[k] - kk * p[k - 1]) / (kk + 1.0);
  }
  // P'_{k+1} = P'_{k-1} + (2k+1) P_k avoids the 1/(1-t^2) endpoint singularity.
  if (!dp.empty()) {
    dp[0] = 0.0;
    if (n > 1)
      dp[1] = 1.0;
    for (std::size_t k = 1; k + 1 < n; ++k)
      dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
  if (!d2p.empty()) {
    d2p[0] = 0.0;
    if (n > 1)
      d2p[1] = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k)
      d2p[k + 1] = d2p[k - 1] + (2.0 * k + 1.0) * dp[k];
  }
}

} // namespace metricdft::numerics
