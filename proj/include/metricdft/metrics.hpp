#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/state.hpp"
#include "metricdft/system.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace metricdft::metrics {

constexpr double kParticles = 2.0;

enum class GaugeRule { eigenstate_min, h_field_min, fixed };
const char *gauge_rule_name(GaugeRule rule);

/// One additive constant c shared by every system of a comparison set.
struct GaugeContext {
  double c = 0.0;
  std::vector<double> member_energies;
  GaugeRule rule = GaugeRule::eigenstate_min;
};

/// c = max(0, -min E). ContractViolation on an empty or non-finite list.
GaugeContext gauge_constant_eigen(std::span<const double> energies);
/// A caller-chosen c; ContractViolation if some E + c < 0.
GaugeContext gauge_fixed(double c, std::span<const double> energies);

struct QuadratureMeta {
  std::size_t radial_panels = 0;
  int panel_order = 0;
  int angular_points = 0;
  double inner = 0.0; ///< first nonzero radial break
  double outer = 0.0;
};
QuadratureMeta describe(const PairQuadrature &quad);

/// Mesh able to integrate products of the given states.
PairQuadrature common_quadrature(std::span<const SystemRecord *const> systems);
PairQuadrature common_quadrature(const SystemRecord &a, const SystemRecord &b);

/// <a|b> over 6D.
double overlap(const CorrelatedState &a, const CorrelatedState &b, const PairQuadrature &quad);

/// sqrt(2N - 2|<a|b>|), evaluated as min over the sign s of ||a - s b||.
/// ContractViolation when a norm misses N by 1e-6; NumericalError when
/// |<a|b>| exceeds N + 1e-6.
double d_psi(const CorrelatedState &a, const CorrelatedState &b, const PairQuadrature &quad);

/// int |rho_a - rho_b| d^3r. Densities on different grids are resampled by
/// monotone interpolation; beyond a grid's last node that density is 0.
double d_rho(const numerics::RadialField &a, const numerics::RadialField &b);

/// int |(E_a + c)|psi_a|^2 - (E_b + c)|psi_b|^2| over 6D. When one gauged
/// weight is zero the result is the other weight times N.
double d_v1_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge,
                  const PairQuadrature &quad);
double d_v1_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge);

/// int |(E_a + c) rho_a - (E_b + c) rho_b| d^3r; N |E_a - E_b| exactly when
/// the two densities have identical samples; zero weights as for d_v1_eigen.
double d_v2_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge);

/// Single-particle energy density on the radial nodes of a pair mesh:
///   h = N [tau + lambda pair + (v + c/N) rho]
/// with tau = (1/2) int |grad_1 psi|^2 d^3r2 and pair = (1/2) int |psi|^2/u d^3r2.
/// The per-particle share c/N makes int h d^3r = (E + c) N.
struct HField {
  numerics::RadialField h, tau, pair, potential, rho;
  double c = 0.0;
  double integral() const { return h.integrate_3d(); }
};
HField h_field(const SystemRecord &system, const GaugeContext &gauge, const PairQuadrature &quad);
HField h_field(const SystemRecord &system, const GaugeContext &gauge);

/// int |h_a - h_b| d^3r; both fields must share their grid.
double d_v2_general(const HField &a, const HField &b);
double d_v2_general(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge);

/// Smallest c on a 1e-3 hartree grid with h >= 0 at every mesh node of every
/// member. NumericalError when c would exceed 1e9.
GaugeContext gauge_constant_h(std::span<const SystemRecord *const> systems,
                              const PairQuadrature &quad);

/// int f over 6D with f = sum_i [|grad_i psi|^2/2 + (v(r_i) + c/N)|psi|^2]
/// + lambda |psi|^2/u; equals (E + c) N for eigenstates.
double f_integral(const SystemRecord &system, const GaugeContext &gauge, const PairQuadrature &quad);

/// Kinetic energy <T> N two ways: (1/2) int |grad psi|^2 and -(1/2) int psi lap psi.
struct KineticForms {
  double gradient = 0.0;
  double laplacian = 0.0;
};
KineticForms kinetic_forms(const CorrelatedState &state, const PairQuadrature &quad);

struct DistanceReport {
  double d_psi = 0.0, d_rho = 0.0, d_v1 = 0.0, d_v2 = 0.0;
  double rescaled_d_psi = 0.0, rescaled_d_rho = 0.0, rescaled_d_v1 = 0.0, rescaled_d_v2 = 0.0;
  GaugeContext gauge;
  QuadratureMeta quadrature;
};

/// All four distances between a and b under the shared gauge, rescaled.
DistanceReport compare(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge);
DistanceReport compare(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge,
                       const PairQuadrature &quad);

/// Maps raw distances to [0, 2]: d_psi by 2/sqrt(2N), d_rho by 2/(2N), the
/// potential distances by 2/[N((E_a + c) + (E_b + c))].
DistanceReport rescale(DistanceReport report, double e_a, double e_b, const GaugeContext &gauge);

/// |<U>/<V>| from the energy components.
double energy_ratio(const SystemRecord &system);

} // namespace metricdft::metrics
