#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/state.hpp"
#include "metricdft/system.hpp"

#include <cstddef>

namespace metricdft::hooke {

struct HookeSpec {
  double omega = 0.5;
  double lambda = 1.0; ///< scales the 1/|r1 - r2| repulsion
};

struct HookeOptions {
  std::size_t grid_n = 16384;        ///< FD intervals; doubled until converged
  std::size_t max_grid_n = 1u << 22;
  double u_max = 0.0;                ///< 0 selects auto_u_max(omega)
  std::size_t density_intervals = 4000;
};

struct RelativeSolution {
  double eps_rel = 0.0;
  numerics::RadialField rel_orbital; ///< chi(u) on [0, u_max], chi(0) = 0
  std::size_t grid_n = 0;
  double richardson_change = 0.0;    ///< relative change grid_n/2 -> grid_n
};

struct HookeSolution {
  HookeSpec spec;
  double eps_rel = 0.0;
  double e_com = 0.0;
  double e_total = 0.0;
  double ionization = 0.0;
  numerics::RadialField rel_orbital;
  DensityPtr density;
  StatePtr state;
  EnergyComponents components;
};

void validate(const HookeSpec &spec);

/// u_max = max(25, 12/sqrt(omega) + 10 omega^(-1/4)).
double auto_u_max(double omega);

/// Lowest s-state of -chi'' + (omega^2 u^2 / 4 + lambda/u) chi = eps chi by
/// second-order finite differences on grid_n intervals of [0, u_max].
/// NumericalError when halving the grid moves eps by 1e-6 relative or more,
/// or when chi has not decayed to 1e-8 of its maximum at u_max.
RelativeSolution solve_relative(const HookeSpec &spec, std::size_t grid_n,
                                double u_max);

/// Solves, doubling grid_n until the Richardson check passes, and assembles
/// energies, density, state and energy components.
HookeSolution assemble_solution(const HookeSpec &spec, const HookeOptions &options = {});

/// Rebuilds a solution from a stored relative orbital without re-solving.
HookeSolution from_relative(const HookeSpec &spec, double eps_rel,
                            numerics::RadialField rel_orbital,
                            std::size_t density_intervals = 4000);

/// rho(r) on a uniform grid by angular reduction of |psi|^2 over the
/// relative coordinate. NumericalError when int rho d^3r misses 2 by 1e-6.
numerics::RadialField compute_density(const HookeSolution &solution,
                                      const numerics::GridPtr &r_grid);

/// Density grid used by assemble_solution.
numerics::GridPtr default_density_grid(const numerics::RadialField &rel_orbital,
                                       double omega, std::size_t intervals);

/// psi(r1, r2, t) = Phi_com(R) chi(u) / (u sqrt(4 pi)) * sqrt(2).
class HookeState final : public CorrelatedState {
public:
  HookeState(double omega, numerics::CubicSpline chi, StateExtent extent);

  void values(double r1, double r2, std::span<const double> u,
              std::span<double> out) const override;
  void derivatives(double r1, double r2, std::span<const double> u,
                   std::span<StateDerivs> out) const override;
  StateExtent extent() const override { return extent_; }

  /// lambda and eps enter chi'' = (omega^2 u^2/4 + lambda/u - eps) chi.
  void set_relative_energy(double lambda, double eps) {
    lambda_ = lambda;
    eps_ = eps;
  }

private:
  double omega_;
  double lambda_ = 1.0;
  double eps_ = 0.0;
  double prefactor_;
  numerics::CubicSpline chi_;
  StateExtent extent_;
};

SystemRecord to_record(const HookeSolution &solution);

} // namespace metricdft::hooke
