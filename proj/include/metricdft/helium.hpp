#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/state.hpp"
#include "metricdft/system.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace metricdft::helium {

struct HeliumSpec {
  double z = 2.0;
  int omega_basis = 10; ///< keep basis functions with i + j + k <= omega_basis
  double lambda = 1.0;
};

/// Symmetrized basis label, i <= j: (|ijk> + |jik>)/sqrt(2) for i < j, |iik>.
struct BasisIndex {
  int i = 0, j = 0, k = 0;
};

/// Hamiltonian pieces over the symmetrized basis. `repulsion` is the
/// unscaled 1/r12 matrix; hamiltonian = kinetic + nuclear + lambda*repulsion.
struct HeliumMatrices {
  std::vector<BasisIndex> basis;
  Eigen::MatrixXd kinetic, nuclear, repulsion, hamiltonian;
  double overlap_deviation = 0.0; ///< max |S - 1| of the basis overlap
};

struct HeliumSolution {
  HeliumSpec spec;
  std::vector<BasisIndex> basis;
  Eigen::VectorXd coeffs; ///< over `basis`, unit norm, c_000 > 0
  double e_total = 0.0;
  double ionization = 0.0; ///< e_total - (-z^2/2)
  EnergyComponents components;
  DensityPtr density;
  StatePtr state;
  std::vector<std::string> warnings;
};

void validate(const HeliumSpec &spec);
std::vector<BasisIndex> symmetrized_basis(int omega_basis);

HeliumMatrices build_matrices(const HeliumSpec &spec);
Eigen::MatrixXd build_hamiltonian(const HeliumSpec &spec);

/// Lowest eigenpair of the variational problem with density and state.
/// For z <= 1 the basis cutoff is raised to at least 10.
HeliumSolution solve(const HeliumSpec &spec);

/// Rebuilds density and state from stored coefficients without re-solving.
HeliumSolution from_coefficients(const HeliumSpec &spec, std::vector<BasisIndex> basis,
                                 Eigen::VectorXd coeffs, double e_total,
                                 EnergyComponents components);

/// rho(r) = (1/2pi) sum_{j,k} (sum_i C_ijk g_i(r))^2 on the given grid.
/// NumericalError when int rho d^3r misses 2 by more than 1e-6.
numerics::RadialField compute_density(const HeliumSolution &solution,
                                      const numerics::GridPtr &r_grid);

/// Uniform grid with spacing 0.01/(2z) out to where rho < 1e-17 rho(0).
numerics::GridPtr default_density_grid(const HeliumSolution &solution);

/// Radial basis function g_n(r) = (2z)^{3/2} e^{-zr} L_n^{(2)}(2zr)/sqrt((n+1)(n+2))
/// for n = 0..g.size()-1, with optional first and second derivatives.
void radial_functions(double z, double r, std::span<double> g, std::span<double> dg = {},
                      std::span<double> d2g = {});

class HeliumState final : public CorrelatedState {
public:
  HeliumState(double z, int omega_basis, const std::vector<BasisIndex> &basis,
              const Eigen::VectorXd &coeffs, StateExtent extent);

  void values(double r1, double r2, std::span<const double> u,
              std::span<double> out) const override;
  void derivatives(double r1, double r2, std::span<const double> u,
                   std::span<StateDerivs> out) const override;
  StateExtent extent() const override { return extent_; }

  /// Unsymmetrized coefficient C_ijk (symmetric in i, j, sum of squares 1).
  struct Term {
    int i, j, k;
    double c;
  };
  const std::vector<Term> &terms() const { return terms_; }
  double z() const { return z_; }
  int omega_basis() const { return omega_; }

private:
  double z_;
  int omega_;
  std::vector<Term> terms_;
  StateExtent extent_;
};

SystemRecord to_record(const HeliumSolution &solution);

} // namespace metricdft::helium
