#pragma once

#include <memory>
#include <span>
#include <vector>

namespace metricdft::numerics {

enum class GridKind { uniform, gauss_legendre_panel, gauss_laguerre };

/// Radial nodes (bohr) with quadrature weights for integrals over dr.
/// Uniform grids carry trapezoidal weights and may start at r = 0.
struct RadialGrid {
  GridKind kind = GridKind::uniform;
  int alpha = 0; ///< only meaningful for gauss_laguerre
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double spacing() const; ///< uniform grids only
  double front() const { return nodes.front(); }
  double back() const { return nodes.back(); }

  /// n intervals on [0, r_max] (n + 1 nodes), trapezoidal weights.
  static std::shared_ptr<const RadialGrid> uniform(double r_max, std::size_t n);
  /// Composite Gauss-Legendre nodes on [breaks].
  static std::shared_ptr<const RadialGrid> panels(const std::vector<double> &breaks,
                                                  int order);
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Tabulated real function of radius. The grid association is fixed at
/// construction.
class RadialField {
public:
  RadialField() = default;
  RadialField(GridPtr grid, std::vector<double> values);

  const RadialGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// sum_i w_i f_i
  double integrate() const;
  /// 4 pi sum_i w_i r_i^2 f_i
  double integrate_3d() const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Natural cubic spline through (x_i, y_i); x strictly increasing. Lookup is
/// O(1) when the abscissae are uniformly spaced.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  /// Outside [x_0, x_n] returns `outside` (default 0).
  double operator()(double x) const;
  /// Value, first and second derivative.
  void evaluate(double x, double &f, double &df, double &d2f) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> knot_values() const { return y_; }

  /// Exact integral of s(x)^2 over the knot range.
  double integral_of_square() const;
  void scale(double factor);

  double outside = 0.0;

private:
  std::size_t locate(double x) const;

  std::vector<double> x_, y_, m_; // m_: second derivatives at knots
  bool uniform_ = false;
  double h_ = 0.0;
};

/// Second derivative on a uniform grid: five-point central stencil inside,
/// five-point one-sided stencils at the two edges on each side.
RadialField second_derivative(const RadialField &field);

/// Same stencil applied to raw samples with spacing h.
std::vector<double> second_derivative(std::span<const double> f, double h);

/// Fritsch-Carlson monotone cubic interpolation of (x, y) evaluated at xq.
double monotone_interpolate(std::span<const double> x, std::span<const double> y,
                            double xq);

} // namespace metricdft::numerics
