#include "metricdft/state.hpp"

#include "metricdft/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace metricdft {

using numerics::append_mapped;
using numerics::gauss_legendre;

double cos_angle(double r1, double r2, double u) {
  if (r1 * r2 == 0.0)
    return 0.0;
  const double t = (r1 * r1 + r2 * r2 - u * u) / (2.0 * r1 * r2);
  return std::clamp(t, -1.0, 1.0);
}

double CorrelatedState::value(double r1, double r2, double t) const {
  require(std::abs(t) <= 1.0, "CorrelatedState::value: |t| > 1");
  const double u = std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * t));
  double out = 0.0;
  values(r1, r2, std::span<const double>(&u, 1), std::span<double>(&out, 1));
  return out;
}

ProductState::ProductState(numerics::CubicSpline orbital, StateExtent extent)
    : orbital_(std::move(orbital)), extent_(extent) {}

void ProductState::values(double r1, double r2, std::span<const double> u,
                          std::span<double> out) const {
  const double v = std::numbers::sqrt2 * orbital_(r1) * orbital_(r2);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(u.size()), v);
}

void ProductState::derivatives(double r1, double r2, std::span<const double> u,
                               std::span<StateDerivs> out) const {
  double f1, d1, dd1, f2, d2, dd2;
  orbital_.evaluate(r1, f1, d1, dd1);
  orbital_.evaluate(r2, f2, d2, dd2);
  const double s = std::numbers::sqrt2;
  StateDerivs d;
  d.value = s * f1 * f2;
  d.d_r1 = s * d1 * f2;
  d.d_r2 = s * f1 * d2;
  d.d_t = 0.0;
  d.laplacian = s * ((dd1 + 2.0 * d1 / r1) * f2 + f1 * (dd2 + 2.0 * d2 / r2));
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] = d;
}

PairQuadrature::PairQuadrature(std::vector<double> breaks, QuadratureOptions options)
    : breaks_(std::move(breaks)), options_(options),
      radial_(breaks_, options.panel_order) {}

PairQuadrature PairQuadrature::covering(std::span<const StateExtent> extents,
                                        QuadratureOptions options) {
  require(!extents.empty(), "PairQuadrature::covering: no extents");
  double inner = extents[0].inner, outer = extents[0].outer;
  for (const auto &e : extents) {
    inner = std::min(inner, e.inner);
    outer = std::max(outer, e.outer);
  }
  return PairQuadrature(
      numerics::geometric_breaks(inner * options.inner_fraction, outer,
                                 options.panel_ratio),
      options);
}

void PairQuadrature::for_each_pair_shell(
    const std::function<void(double, double, std::span<const double>,
                             std::span<const double>)> &visit) const {
  const auto &rule_r = gauss_legendre(options_.panel_order);
  const auto &rule_u = gauss_legendre(options_.angular_points);
  std::vector<double> r2n, r2w, un, uw;
  const double pref = 2.0 * 8.0 * std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < radial_.nodes.size(); ++i) {
    const double r1 = radial_.nodes[i];
    const double w1 = radial_.weights[i];
    r2n.clear();
    r2w.clear();
    for (std::size_t p = 0; p + 1 < breaks_.size() && breaks_[p] < r1; ++p)
      append_mapped(rule_r, breaks_[p], std::min(breaks_[p + 1], r1), r2n, r2w);
    for (std::size_t j = 0; j < r2n.size(); ++j) {
      const double r2 = r2n[j];
      un.clear();
      uw.clear();
      append_mapped(rule_u, r1 - r2, r1 + r2, un, uw);
      const double base = pref * w1 * r2w[j] * r1 * r2;
      for (std::size_t k = 0; k < un.size(); ++k)
        uw[k] *= base * un[k];
      visit(r1, r2, un, uw);
    }
  }
}

void PairQuadrature::for_each_partner_shell(
    double r1,
    const std::function<void(double, std::span<const double>,
                             std::span<const double>)> &visit) const {
  const auto &rule_r = gauss_legendre(options_.panel_order);
  const auto &rule_u = gauss_legendre(options_.angular_points);
  std::vector<double> r2n, r2w, un, uw;
  for (std::size_t p = 0; p + 1 < breaks_.size(); ++p) {
    const double a = breaks_[p], b = breaks_[p + 1];
    if (a < r1 && r1 < b) {
      append_mapped(rule_r, a, r1, r2n, r2w);
      append_mapped(rule_r, r1, b, r2n, r2w);
    } else {
      append_mapped(rule_r, a, b, r2n, r2w);
    }
  }
  const double pref = 2.0 * std::numbers::pi / r1;
  for (std::size_t j = 0; j < r2n.size(); ++j) {
    const double r2 = r2n[j];
    un.clear();
    uw.clear();
    append_mapped(rule_u, std::abs(r1 - r2), r1 + r2, un, uw);
    const double base = pref * r2w[j] * r2;
    for (std::size_t k = 0; k < un.size(); ++k)
      uw[k] *= base * un[k];
    visit(r2, un, uw);
  }
}

double integrate_pairs(
    const PairQuadrature &quad,
    const std::function<double(double, double, double)> &integrand) {
  double total = 0.0;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    for (std::size_t k = 0; k < u.size(); ++k)
      total += w[k] * integrand(r1, r2, u[k]);
  });
  return total;
}

} // namespace metricdft
