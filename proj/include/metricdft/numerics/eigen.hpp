#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace metricdft::numerics {

struct TridiagEigen {
  std::vector<double> values;               ///< ascending
  std::vector<std::vector<double>> vectors; ///< vectors[k] pairs with values[k]
};

/// Full spectrum of the symmetric tridiagonal matrix (diag, offdiag) by
/// implicit QL with Wilkinson shifts. offdiag.size() == diag.size() - 1.
/// Eigenvectors, when requested, are normalized so that sum_i w_i v_i^2 = 1
/// (w empty means unit weights) with the first non-negligible component > 0.
TridiagEigen eig_sym_tridiag(std::span<const double> diag,
                             std::span<const double> offdiag,
                             bool want_vectors = true,
                             std::span<const double> weights = {});

/// The `count` lowest eigenpairs by Sturm-sequence bisection and inverse
/// iteration. O(n) memory per vector; intended for large grid Hamiltonians.
TridiagEigen lowest_eigenpairs_tridiag(std::span<const double> diag,
                                       std::span<const double> offdiag,
                                       int count,
                                       std::span<const double> weights = {});

/// Number of eigenvalues strictly below x (Sturm count).
std::size_t sturm_count(std::span<const double> diag,
                        std::span<const double> offdiag, double x);

struct DenseEigen {
  Eigen::VectorXd values;  ///< ascending
  Eigen::MatrixXd vectors; ///< orthonormal columns
};

/// Symmetric dense eigensolve. The input must be symmetric to 1e-10 relative;
/// it is symmetrized before solving. Column signs are fixed so that the first
/// non-negligible component is positive.
DenseEigen eig_sym_dense(const Eigen::MatrixXd &matrix);

} // namespace metricdft::numerics
