#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace metricdft {

/// Radial range a state occupies: `inner` is the smallest length scale that
/// must be resolved, `outer` the radius beyond which |psi|^2 is negligible.
struct StateExtent {
  double inner = 1.0;
  double outer = 10.0;
};

/// Value and derivatives of an s-state psi(r1, r2, t), t = cos(theta_12).
/// d_r1, d_r2, d_t are partials in the (r1, r2, t) coordinates;
/// laplacian is (nabla_1^2 + nabla_2^2) psi.
struct StateDerivs {
  double value = 0.0;
  double d_r1 = 0.0;
  double d_r2 = 0.0;
  double d_t = 0.0;
  double laplacian = 0.0;
};

/// Two-electron, exchange-symmetric, real s-state normalized to N = 2.
/// Points are passed as (r1, r2) plus a batch of interelectronic distances
/// u = |r1 - r2| in [|r1 - r2|, r1 + r2].
class CorrelatedState {
public:
  virtual ~CorrelatedState() = default;

  virtual void values(double r1, double r2, std::span<const double> u,
                      std::span<double> out) const = 0;
  virtual void derivatives(double r1, double r2, std::span<const double> u,
                           std::span<StateDerivs> out) const = 0;
  virtual StateExtent extent() const = 0;

  double value(double r1, double r2, double t) const;
};

using StatePtr = std::shared_ptr<const CorrelatedState>;

/// cos(theta_12) from (r1, r2, u), clamped to [-1, 1].
double cos_angle(double r1, double r2, double u);

/// psi(r1, r2) = sqrt(2) phi(r1) phi(r2) for a single orbital phi with
/// int phi^2 d^3r = 1, so the state carries norm 2 like every other state.
class ProductState final : public CorrelatedState {
public:
  ProductState(numerics::CubicSpline orbital, StateExtent extent);

  void values(double r1, double r2, std::span<const double> u,
              std::span<double> out) const override;
  void derivatives(double r1, double r2, std::span<const double> u,
                   std::span<StateDerivs> out) const override;
  StateExtent extent() const override { return extent_; }

  double orbital(double r) const { return orbital_(r); }

private:
  numerics::CubicSpline orbital_;
  StateExtent extent_;
};

struct QuadratureOptions {
  int panel_order = 16;       ///< Gauss-Legendre points per radial panel
  double panel_ratio = 1.4;   ///< geometric growth of panel breaks
  double inner_fraction = 0.05;
  int angular_points = 40;    ///< Gauss-Legendre points in u per (r1, r2)
};

/// Quadrature over the 6D configuration space of two electrons restricted to
/// s-states, in the coordinates (r1, r2, u):
///   d^3r1 d^3r2 -> 8 pi^2 r1 r2 u dr1 dr2 du,   |r1 - r2| <= u <= r1 + r2.
class PairQuadrature {
public:
  PairQuadrature(std::vector<double> breaks, QuadratureOptions options = {});

  /// Mesh covering every extent in `extents`.
  static PairQuadrature covering(std::span<const StateExtent> extents,
                                 QuadratureOptions options = {});

  const std::vector<double> &breaks() const { return breaks_; }
  const QuadratureOptions &options() const { return options_; }
  /// Composite rule for integrals over r on the same breaks.
  const numerics::PanelQuadrature &radial() const { return radial_; }

  /// Visits shells (r1, r2 < r1, u-nodes, weights) of the half space r2 < r1.
  /// Weights already include the factor 2 for the mirrored half, so summing
  /// w * F over all shells integrates any exchange-symmetric F over 6D.
  void for_each_pair_shell(
      const std::function<void(double r1, double r2, std::span<const double> u,
                               std::span<const double> w)> &visit) const;

  /// Visits shells over the full r2 range for a fixed r1. Summing w * F gives
  /// int d^3r2 F(r1, r2, u).
  void for_each_partner_shell(
      double r1,
      const std::function<void(double r2, std::span<const double> u,
                               std::span<const double> w)> &visit) const;

private:
  std::vector<double> breaks_;
  QuadratureOptions options_;
  numerics::PanelQuadrature radial_;
};

/// 6D integral of an exchange-symmetric integrand built from per-shell values.
double integrate_pairs(
    const PairQuadrature &quad,
    const std::function<double(double r1, double r2, double u)> &integrand);

} // namespace metricdft
