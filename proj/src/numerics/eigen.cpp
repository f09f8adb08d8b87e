#include "metricdft/numerics/eigen.hpp"

#include "metricdft/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace metricdft::numerics {

namespace {

void check_tridiag(std::span<const double> d, std::span<const double> e) {
  require(d.size() >= 2, "eig_sym_tridiag: dimension must be >= 2");
  require(e.size() + 1 == d.size(),
          "eig_sym_tridiag: offdiag must have size(diag) - 1 entries");
}

void normalize_and_fix_sign(std::vector<double> &v, std::span<const double> w) {
  double norm = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    norm += (w.empty() ? 1.0 : w[i]) * v[i] * v[i];
    vmax = std::max(vmax, std::abs(v[i]));
  }
  const double s = 1.0 / std::sqrt(norm);
  double sign = 1.0;
  for (double x : v)
    if (std::abs(x) > 1e-10 * vmax) {
      sign = x < 0.0 ? -1.0 : 1.0;
      break;
    }
  for (auto &x : v)
    x *= s * sign;
}

double gershgorin_bound(std::span<const double> d, std::span<const double> e,
                        bool lower) {
  double b = lower ? std::numeric_limits<double>::max()
                   : std::numeric_limits<double>::lowest();
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0)
      r += std::abs(e[i - 1]);
    if (i + 1 < n)
      r += std::abs(e[i]);
    b = lower ? std::min(b, d[i] - r) : std::max(b, d[i] + r);
  }
  return b;
}

} // namespace

std::size_t sturm_count(std::span<const double> d, std::span<const double> e,
                        double x) {
  std::size_t count = 0;
  double q = d[0] - x;
  const double tiny = std::numeric_limits<double>::min() * 1e4;
  if (q < 0.0)
    ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (std::abs(q) < tiny)
      q = -tiny;
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (q < 0.0)
      ++count;
  }
  return count;
}

TridiagEigen eig_sym_tridiag(std::span<const double> diag,
                             std::span<const double> offdiag, bool want_vectors,
                             std::span<const double> weights) {
  check_tridiag(diag, offdiag);
  const std::size_t n = diag.size();
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());
  // z is stored row-major: z[i*n + k] = component i of eigenvector k
  std::vector<double> z;
  if (want_vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      z[i * n + i] = 1.0;
  }
  const int max_iter = 30 * static_cast<int>(n);
  int total_iter = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m == l)
        break;
      if (++total_iter > max_iter)
        throw NumericalError("eig_sym_tridiag: QL iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool early = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          early = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        if (want_vectors)
          for (std::size_t k = 0; k < n; ++k) {
            f = z[k * n + ii + 1];
            z[k * n + ii + 1] = s * z[k * n + ii] + c * f;
            z[k * n + ii] = c * z[k * n + ii] - s * f;
          }
      }
      if (early)
        continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagEigen out;
  out.values.reserve(n);
  for (auto k : order)
    out.values.push_back(d[k]);
  if (want_vectors) {
    out.vectors.reserve(n);
    for (auto k : order) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i)
        v[i] = z[i * n + k];
      normalize_and_fix_sign(v, weights);
      out.vectors.push_back(std::move(v));
    }
  }
  return out;
}

TridiagEigen lowest_eigenpairs_tridiag(std::span<const double> diag,
                                       std::span<const double> offdiag,
                                       int count,
                                       std::span<const double> weights) {
  check_tridiag(diag, offdiag);
  const std::size_t n = diag.size();
  require(count >= 1 && static_cast<std::size_t>(count) <= n,
          "lowest_eigenpairs_tridiag: bad eigenpair count");
  const double lo0 = gershgorin_bound(diag, offdiag, true);
  const double hi0 = gershgorin_bound(diag, offdiag, false);
  const double scale = std::max(std::abs(lo0), std::abs(hi0));
  TridiagEigen out;
  for (int k = 0; k < count; ++k) {
    double lo = lo0, hi = hi0;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count(diag, offdiag, mid) > static_cast<std::size_t>(k))
        hi = mid;
      else
        lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    out.values.push_back(lambda);

    // inverse iteration with a slightly perturbed shift (Thomas algorithm)
    const double shift = lambda - 1e-10 * std::max(scale, 1.0) * 1e-3;
    std::vector<double> v(n, 1.0), c(n), dd(n);
    for (int pass = 0; pass < 4; ++pass) {
      // solve (T - shift) x = v
      double b0 = diag[0] - shift;
      c[0] = offdiag[0] / b0;
      dd[0] = v[0] / b0;
      for (std::size_t i = 1; i < n; ++i) {
        const double bi = diag[i] - shift - offdiag[i - 1] * c[i - 1];
        if (i + 1 < n)
          c[i] = offdiag[i] / bi;
        dd[i] = (v[i] - offdiag[i - 1] * dd[i - 1]) / bi;
      }
      v[n - 1] = dd[n - 1];
      for (std::size_t i = n - 1; i-- > 0;)
        v[i] = dd[i] - c[i] * v[i + 1];
      // orthogonalize against lower pairs (Euclidean)
      for (const auto &u : out.vectors) {
        double dot = 0.0, uu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          dot += u[i] * v[i];
          uu += u[i] * u[i];
        }
        for (std::size_t i = 0; i < n; ++i)
          v[i] -= dot / uu * u[i];
      }
      double norm = 0.0;
      for (double x : v)
        norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw NumericalError("lowest_eigenpairs_tridiag: inverse iteration failed");
      for (auto &x : v)
        x /= norm;
    }
    normalize_and_fix_sign(v, weights);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

DenseEigen eig_sym_dense(const Eigen::MatrixXd &matrix) {
  require(matrix.rows() == matrix.cols() && matrix.rows() >= 1,
          "eig_sym_dense: matrix must be square and non-empty");
  const double amax = matrix.cwiseAbs().maxCoeff();
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(amax, 1e-300)) {
    std::ostringstream msg;
    msg << "eig_sym_dense: matrix not symmetric, max asymmetry " << asym;
    throw ContractViolation(msg.str());
  }
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eig_sym_dense: eigensolver did not converge");
  DenseEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
    const double cmax = out.vectors.col(k).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
      const double x = out.vectors(i, k);
      if (std::abs(x) > 1e-10 * cmax) {
        if (x < 0.0)
          out.vectors.col(k) *= -1.0;
        break;
      }
    }
  }
  return out;
}

} // namespace metricdft::numerics
