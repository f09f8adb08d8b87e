#include "metricdft/numerics/grid.hpp"

#include "metricdft/error.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace metricdft::numerics {

double RadialGrid::spacing() const {
  require(kind == GridKind::uniform, "RadialGrid::spacing: grid is not uniform");
  return nodes[1] - nodes[0];
}

GridPtr RadialGrid::uniform(double r_max, std::size_t n) {
  require(r_max > 0.0 && n >= 2, "RadialGrid::uniform: need r_max > 0, n >= 2");
  auto g = std::make_shared<RadialGrid>();
  g->kind = GridKind::uniform;
  const double h = r_max / static_cast<double>(n);
  g->nodes.resize(n + 1);
  g->weights.assign(n + 1, h);
  for (std::size_t i = 0; i <= n; ++i)
    g->nodes[i] = h * static_cast<double>(i);
  g->nodes[n] = r_max;
  g->weights.front() = g->weights.back() = 0.5 * h;
  return g;
}

GridPtr RadialGrid::panels(const std::vector<double> &breaks, int order) {
  PanelQuadrature q(breaks, order);
  auto g = std::make_shared<RadialGrid>();
  g->kind = GridKind::gauss_legendre_panel;
  g->nodes = std::move(q.nodes);
  g->weights = std::move(q.weights);
  return g;
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "RadialField: null grid");
  require(values_.size() == grid_->size(),
          "RadialField: value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v))
      throw NumericalError("RadialField: non-finite sample");
}

double RadialField::integrate() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    s += grid_->weights[i] * values_[i];
  return s;
}

double RadialField::integrate_3d() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double r = grid_->nodes[i];
    s += grid_->weights[i] * r * r * values_[i];
  }
  return 4.0 * std::numbers::pi * s;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  require(n >= 3 && y_.size() == n, "CubicSpline: need >= 3 matching samples");
  for (std::size_t i = 1; i < n; ++i)
    require(x_[i] > x_[i - 1], "CubicSpline: abscissae must increase");
  // tridiagonal system for natural spline second derivatives
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0;
    const double b = (h0 + h1) / 3.0;
    const double cc = h1 / 6.0;
    const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i)
    m_[i] = d[i] - c[i] * m_[i + 1];
  h_ = (x_.back() - x_.front()) / static_cast<double>(n - 1);
  uniform_ = true;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((x_[i] - x_[i - 1]) - h_) > 1e-9 * h_) {
      uniform_ = false;
      break;
    }
}

std::size_t CubicSpline::locate(double x) const {
  const std::size_t n = x_.size();
  if (uniform_) {
    auto i = static_cast<std::size_t>((x - x_.front()) / h_);
    return std::min(i, n - 2);
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, n - 2);
}

double CubicSpline::operator()(double x) const {
  if (x < x_.front() || x > x_.back())
    return outside;
  const std::size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = 1.0 - a;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

void CubicSpline::evaluate(double x, double &f, double &df, double &d2f) const {
  if (x < x_.front() || x > x_.back()) {
    f = outside;
    df = d2f = 0.0;
    return;
  }
  const std::size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = 1.0 - a;
  f = a * y_[i] + b * y_[i + 1] +
      ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  df = (y_[i + 1] - y_[i]) / h -
       (3.0 * a * a - 1.0) * h / 6.0 * m_[i] +
       (3.0 * b * b - 1.0) * h / 6.0 * m_[i + 1];
  d2f = a * m_[i] + b * m_[i + 1];
}

double CubicSpline::integral_of_square() const {
  // s^2 is a degree-6 polynomial per interval: 4-point Gauss-Legendre is exact.
  const auto &rule = gauss_legendre(4);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double lo = x_[i], hi = x_[i + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double v = (*this)(mid + half * rule.nodes[k]);
      total += half * rule.weights[k] * v * v;
    }
  }
  return total;
}

void CubicSpline::scale(double factor) {
  for (auto &v : y_)
    v *= factor;
  for (auto &v : m_)
    v *= factor;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  require(n >= 5, "second_derivative: need at least 5 nodes");
  std::vector<double> out(n);
  const double s = 1.0 / (12.0 * h * h);
  // one-sided O(h^4) stencils (6-point) at the edges
  auto left = [&](std::size_t i0, std::size_t off) {
    // off = 0 or 1: derivative at node i0 + off using nodes i0..i0+5
    static constexpr double c0[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
    static constexpr double c1[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    const double *c = off == 0 ? c0 : c1;
    double acc = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
      acc += c[k] * f[i0 + k];
    return acc * s;
  };
  auto right = [&](std::size_t i_end, std::size_t off) {
    static constexpr double c0[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
    static constexpr double c1[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    const double *c = off == 0 ? c0 : c1;
    double acc = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
      acc += c[k] * f[i_end - k];
    return acc * s;
  };
  if (n < 6) {
    // five nodes: fall back to central where possible, low-order at ends
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = std::clamp<std::size_t>(i, 1, n - 2);
      out[i] = (f[j - 1] - 2.0 * f[j] + f[j + 1]) / (h * h);
    }
    out[2] = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) * s;
    return out;
  }
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] -
              f[i + 2]) *
             s;
  out[0] = left(0, 0);
  out[1] = left(0, 1);
  out[n - 1] = right(n - 1, 0);
  out[n - 2] = right(n - 1, 1);
  return out;
}

RadialField second_derivative(const RadialField &field) {
  const auto &g = field.grid();
  require(g.kind == GridKind::uniform,
          "second_derivative: grid must be uniform");
  return RadialField(field.grid_ptr(), second_derivative(field.values(), g.spacing()));
}

double monotone_interpolate(std::span<const double> x, std::span<const double> y,
                            double xq) {
  const std::size_t n = x.size();
  require(n >= 2 && y.size() == n, "monotone_interpolate: bad sample arrays");
  if (xq < x.front() || xq > x.back())
    throw NumericalError("monotone_interpolate: extrapolation requested at " +
                         std::to_string(xq));
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  i = std::min(i == 0 ? 0 : i - 1, n - 2);
  auto secant = [&](std::size_t k) { return (y[k + 1] - y[k]) / (x[k + 1] - x[k]); };
  auto slope = [&](std::size_t k) {
    if (k == 0)
      return secant(0);
    if (k == n - 1)
      return secant(n - 2);
    const double a = secant(k - 1), b = secant(k);
    if (a * b <= 0.0)
      return 0.0;
    const double h0 = x[k] - x[k - 1], h1 = x[k + 1] - x[k];
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    return (w1 + w2) / (w1 / a + w2 / b);
  };
  const double h = x[i + 1] - x[i];
  const double t = (xq - x[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * slope(i) +
         (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * slope(i + 1);
}

} // namespace metricdft::numerics
