#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/state.hpp"
#include "metricdft/system.hpp"

namespace metricdft::ksinv {

/// Large-r form used beyond the density floor.
enum class TailModel {
  coulomb,  ///< v = C/r with C matched at valid_r_max
  harmonic, ///< v = a + b r^2 fitted just inside valid_r_max
};

/// Inverted single-particle potential. `r_v` holds r*v(r), finite at r = 0
/// (-Z for a bare nucleus, 0 for a smooth trap). `v_ks[0]` holds the r -> 0
/// limit when finite and repeats node 1 otherwise.
struct KsPotential {
  numerics::RadialField v_ks;
  numerics::RadialField r_v;
  double valid_r_max = 0.0;
  TailModel tail = TailModel::coulomb;
  double tail_a = 0.0, tail_b = 0.0;

  double operator()(double r) const;

private:
  friend KsPotential ks_potential(const numerics::RadialField &, double, TailModel);
  std::shared_ptr<const numerics::CubicSpline> spline_; // of r*v on [0, valid_r_max]
};

struct RoundTrip {
  double eigenvalue = 0.0; ///< lowest eigenvalue of -u''/2 + v u, h^2-extrapolated
  double overlap = 0.0;    ///< |<phi, phi_KS>|
};

struct KsSystem {
  numerics::RadialField orbital;
  double eps_ks = 0.0;
  KsPotential potential;
  double e_ks_total = 0.0;
  StatePtr state;
  DensityPtr density;
  double valid_r_max = 0.0;
  RoundTrip round_trip;
};

/// phi = sqrt(rho/2). Samples below -1e-12 are a contract violation; smaller
/// negatives clamp to 0.
numerics::RadialField ks_orbital(const numerics::RadialField &density);

/// eps_KS = E(N) - E(N-1): negative for bound ions, eps_rel for the trap.
double ks_eigenvalue(const SystemRecord &system);

/// v = eps + (r phi)''/(2 r phi) with the five-point stencil, wherever
/// rho > 1e-12 max rho; tail model beyond.
KsPotential ks_potential(const numerics::RadialField &orbital, double eps_ks, TailModel tail);

/// Re-solves -u''/2 + v u = eps u (u = r phi) on the orbital grid.
RoundTrip round_trip(const KsPotential &v_ks, const numerics::RadialField &orbital);

/// Product state sqrt(2) phi(r1) phi(r2), e_ks_total = 2 eps.
KsSystem ks_two_electron(numerics::RadialField orbital, KsPotential v_ks, double eps_ks,
                         DensityPtr density, StateExtent extent);

/// Full inversion of a many-body record; density storage is shared.
KsSystem invert(const SystemRecord &many_body);

SystemRecord to_record(const KsSystem &ks, const SystemRecord &source);

TailModel tail_for(Family family);

} // namespace metricdft::ksinv
