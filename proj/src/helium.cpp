#include "metricdft/helium.hpp"

#include "metricdft/error.hpp"
#include "metricdft/numerics/eigen.hpp"
#include "metricdft/numerics/polynomials.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace metricdft::helium {

using numerics::GridPtr;
using numerics::RadialField;
using numerics::RadialGrid;
using numerics::WeightKind;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_factor(int n) { return 1.0 / std::sqrt((n + 1.0) * (n + 2.0)); }

// Dimensionless radial matrices over G_n(x) = n_n e^{-x/2} L_n^{(2)}(x).
struct OneBody {
  Eigen::MatrixXd overlap;     // int x^2 G G
  Eigen::MatrixXd kinetic;     // int x^2 G' G'
  Eigen::MatrixXd centrifugal; // int G G
  Eigen::MatrixXd coulomb;     // int x G G
};

OneBody one_body(int omega) {
  const int n = omega + 1;
  const int npts = 2 * omega + 16;
  OneBody ob;
  ob.overlap = ob.kinetic = ob.centrifugal = ob.coulomb = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> L(n), L3(std::max(n - 1, 1));
  for (int alpha = 0; alpha <= 2; ++alpha) {
    const auto rule = numerics::gauss_rule(WeightKind::laguerre, npts, alpha);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = rule.nodes[q], w = rule.weights[q];
      numerics::laguerre_table(2.0, x, L);
      numerics::laguerre_table(3.0, x, L3);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b <= a; ++b) {
          const double nn = norm_factor(a) * norm_factor(b);
          const double ll = nn * L[a] * L[b] * w;
          if (alpha == 0) {
            ob.centrifugal(a, b) += ll;
          } else if (alpha == 1) {
            ob.coulomb(a, b) += ll;
          } else {
            ob.overlap(a, b) += ll;
            const double da = (a > 0 ? -L3[a - 1] : 0.0) - 0.5 * L[a];
            const double db = (b > 0 ? -L3[b - 1] : 0.0) - 0.5 * L[b];
            ob.kinetic(a, b) += nn * da * db * w;
          }
        }
    }
  }
  for (auto *m : {&ob.overlap, &ob.kinetic, &ob.centrifugal, &ob.coulomb})
    *m = m->selfadjointView<Eigen::Lower>();
  return ob;
}

std::size_t pair_index(int a, int b) {
  if (a > b)
    std::swap(a, b);
  return static_cast<std::size_t>(b) * (b + 1) / 2 + a;
}

// Rx[l](pair(a,b), pair(c,d)) = int int x1^2 G_a G_b(x1) x2^2 G_c G_d(x2)
//                              x_<^l / x_>^{l+1} dx1 dx2.
std::vector<Eigen::MatrixXd> radial_repulsion(int omega) {
  const int n = omega + 1;
  const int lmax = 2 * omega;
  const std::size_t npair = static_cast<std::size_t>(n) * (n + 1) / 2;
  const double x_max = 60.0 + 8.0 * omega;

  // outer mesh: graded near 0, then panels of width ~2
  std::vector<double> breaks{0.0};
  for (double x = 0.05; x < 2.0; x *= 2.0)
    breaks.push_back(x);
  for (double x = 2.0; x < x_max - 1e-9; x += 2.0)
    breaks.push_back(x);
  breaks.push_back(x_max);
  numerics::PanelQuadrature outer(breaks, 16);
  const std::size_t M = outer.nodes.size();

  std::vector<double> L(n);
  auto pair_products = [&](double x, double *out) {
    numerics::laguerre_table(2.0, x, L);
    const double e = std::exp(-x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b)
        out[pair_index(a, b)] = norm_factor(a) * norm_factor(b) * L[a] * L[b] * e;
  };

  Eigen::MatrixXd P(M, npair); // x^2 w G_a G_b at outer nodes
  std::vector<double> buf(npair);
  for (std::size_t m = 0; m < M; ++m) {
    pair_products(outer.nodes[m], buf.data());
    const double s = outer.weights[m] * outer.nodes[m] * outer.nodes[m];
    for (std::size_t p = 0; p < npair; ++p)
      P(m, p) = s * buf[p];
  }

  // sub-interval rule between consecutive outer nodes: gaps [0,x0], ..., [x_{M-1}, x_max]
  const auto &sub = numerics::gauss_legendre(10);
  const std::size_t G = M + 1;
  const std::size_t S = sub.size();
  std::vector<double> sx(G * S), sw(G * S);
  Eigen::MatrixXd SP(G * S, npair); // x G_c G_d at sub nodes, times weight
  for (std::size_t g = 0; g < G; ++g) {
    const double a = g == 0 ? 0.0 : outer.nodes[g - 1];
    const double b = g == M ? x_max : outer.nodes[g];
    for (std::size_t q = 0; q < S; ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * sub.nodes[q];
      const double w = 0.5 * (b - a) * sub.weights[q];
      sx[g * S + q] = x;
      sw[g * S + q] = w;
      pair_products(x, buf.data());
      for (std::size_t p = 0; p < npair; ++p)
        SP(g * S + q, p) = w * x * buf[p];
    }
  }

  std::vector<Eigen::MatrixXd> result(lmax + 1);
  Eigen::MatrixXd Y(M, npair);
  Eigen::RowVectorXd acc(npair);
  for (int l = 0; l <= lmax; ++l) {
    // lower part: int_0^{x_m} x G G (x/x_m)^{l+1}, swept upward
    acc.setZero();
    for (std::size_t m = 0; m < M; ++m) {
      const double xm = outer.nodes[m];
      if (m > 0)
        acc *= std::pow(outer.nodes[m - 1] / xm, l + 1);
      for (std::size_t q = 0; q < S; ++q) {
        const std::size_t row = m * S + q;
        acc += std::pow(sx[row] / xm, l + 1) * SP.row(row);
      }
      Y.row(m) = acc;
    }
    // upper part: int_{x_m}^inf x G G (x_m/x)^l, swept downward
    acc.setZero();
    for (std::size_t m = M; m-- > 0;) {
      const double xm = outer.nodes[m];
      if (m + 1 < M)
        acc *= std::pow(xm / outer.nodes[m + 1], l);
      for (std::size_t q = 0; q < S; ++q) {
        const std::size_t row = (m + 1) * S + q;
        acc += std::pow(xm / sx[row], l) * SP.row(row);
      }
      Y.row(m) += acc;
    }
    Eigen::MatrixXd R = P.transpose() * Y;
    result[l] = 0.5 * (R + R.transpose());
  }
  return result;
}

// A[k][k'][l] = int Theta_k Theta_k' P_l dt, Theta_k = sqrt((2k+1)/2) P_k.
std::vector<double> angular_factors(int omega) {
  const int n = omega + 1, nl = 2 * omega + 1;
  std::vector<double> A(static_cast<std::size_t>(n) * n * nl, 0.0);
  const auto &rule = numerics::gauss_legendre(2 * omega + 2);
  std::vector<double> P(nl);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    numerics::legendre_table(rule.nodes[q], P);
    for (int k = 0; k < n; ++k)
      for (int kp = 0; kp < n; ++kp) {
        const double th = std::sqrt((2 * k + 1) / 2.0) * std::sqrt((2 * kp + 1) / 2.0) * P[k] * P[kp];
        for (int l = 0; l < nl; ++l)
          A[(static_cast<std::size_t>(k) * n + kp) * nl + l] += rule.weights[q] * th * P[l];
      }
  }
  return A;
}

struct Component {
  int i, j, k;
  double c;
};

std::vector<Component> expand(const BasisIndex &b) {
  if (b.i == b.j)
    return {{b.i, b.j, b.k, 1.0}};
  const double s = 1.0 / std::numbers::sqrt2;
  return {{b.i, b.j, b.k, s}, {b.j, b.i, b.k, s}};
}

double density_at(const HeliumState &st, double r, std::vector<double> &g,
                  std::vector<double> &acc) {
  const int n = st.omega_basis() + 1;
  radial_functions(st.z(), r, g);
  std::fill(acc.begin(), acc.end(), 0.0);
  for (const auto &t : st.terms())
    acc[static_cast<std::size_t>(t.j) * n + t.k] += t.c * g[t.i];
  double s = 0.0;
  for (double a : acc)
    s += a * a;
  return s / kTwoPi;
}

} // namespace

void validate(const HeliumSpec &spec) {
  require(std::isfinite(spec.z) && spec.z > 0.0, "helium: z must be > 0");
  require(spec.omega_basis >= 0, "helium: omega_basis must be >= 0");
  require(spec.omega_basis <= 20, "helium: omega_basis above the desk-scale cap of 20");
  require(spec.lambda >= 0.0 && spec.lambda <= 1.0, "helium: lambda must lie in [0, 1]");
}

std::vector<BasisIndex> symmetrized_basis(int omega) {
  std::vector<BasisIndex> out;
  for (int s = 0; s <= omega; ++s)
    for (int k = 0; k <= s; ++k)
      for (int i = 0; i <= s - k; ++i) {
        const int j = s - k - i;
        if (i <= j)
          out.push_back({i, j, k});
      }
  return out;
}

void radial_functions(double z, double r, std::span<double> g, std::span<double> dg,
                      std::span<double> d2g) {
  const std::size_t n = g.size();
  const double s = 2.0 * z, x = s * r;
  const double e = std::pow(s, 1.5) * std::exp(-0.5 * x);
  double L[64], L3[64], L4[64];
  require(n <= 64, "radial_functions: too many functions");
  numerics::laguerre_table(2.0, x, std::span<double>(L, n));
  if (!dg.empty() || !d2g.empty()) {
    numerics::laguerre_table(3.0, x, std::span<double>(L3, n));
    numerics::laguerre_table(4.0, x, std::span<double>(L4, n));
  }
  for (std::size_t a = 0; a < n; ++a) {
    const double c = e * norm_factor(static_cast<int>(a));
    g[a] = c * L[a];
    const double d1 = a > 0 ? -L3[a - 1] : 0.0;
    if (!dg.empty())
      dg[a] = s * c * (d1 - 0.5 * L[a]);
    if (!d2g.empty()) {
      const double d2 = a > 1 ? L4[a - 2] : 0.0;
      d2g[a] = s * s * c * (d2 - d1 + 0.25 * L[a]);
    }
  }
}

HeliumMatrices build_matrices(const HeliumSpec &spec) {
  validate(spec);
  const int omega = spec.omega_basis;
  const int n = omega + 1, nl = 2 * omega + 1;
  const double z = spec.z, s = 2.0 * z;
  const OneBody ob = one_body(omega);
  const auto R = radial_repulsion(omega);
  const auto A = angular_factors(omega);

  HeliumMatrices out;
  out.basis = symmetrized_basis(omega);
  const auto dim = static_cast<Eigen::Index>(out.basis.size());
  out.kinetic = out.nuclear = out.repulsion = Eigen::MatrixXd::Zero(dim, dim);

  double overlap_dev = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      double t = 0.0, v = 0.0, u = 0.0, o = 0.0;
      for (const auto &p : expand(out.basis[a]))
        for (const auto &q : expand(out.basis[b])) {
          const double cc = p.c * q.c;
          if (p.k == q.k) {
            const double cent = 0.5 * p.k * (p.k + 1);
            o += cc * ob.overlap(p.i, q.i) * ob.overlap(p.j, q.j);
            if (p.j == q.j) {
              t += cc * s * s * (0.5 * ob.kinetic(p.i, q.i) + cent * ob.centrifugal(p.i, q.i));
              v += cc * (-z * s) * ob.coulomb(p.i, q.i);
            }
            if (p.i == q.i) {
              t += cc * s * s * (0.5 * ob.kinetic(p.j, q.j) + cent * ob.centrifugal(p.j, q.j));
              v += cc * (-z * s) * ob.coulomb(p.j, q.j);
            }
          }
          const std::size_t p1 = pair_index(p.i, q.i), p2 = pair_index(p.j, q.j);
          const double *ang = &A[(static_cast<std::size_t>(p.k) * n + q.k) * nl];
          for (int l = std::abs(p.k - q.k); l <= p.k + q.k; l += 2)
            u += cc * ang[l] * s * R[l](p1, p2);
        }
      out.kinetic(a, b) = out.kinetic(b, a) = t;
      out.nuclear(a, b) = out.nuclear(b, a) = v;
      out.repulsion(a, b) = out.repulsion(b, a) = u;
      overlap_dev = std::max(overlap_dev, std::abs(o - (a == b ? 1.0 : 0.0)));
    }
  out.overlap_deviation = overlap_dev;
  if (overlap_dev > 1e-9) {
    std::ostringstream os;
    os << "helium: basis overlap deviates from identity by " << overlap_dev
       << " (normalization constants or quadrature order)";
    throw NumericalError(os.str());
  }
  out.hamiltonian = out.kinetic + out.nuclear + spec.lambda * out.repulsion;
  return out;
}

Eigen::MatrixXd build_hamiltonian(const HeliumSpec &spec) {
  return build_matrices(spec).hamiltonian;
}

HeliumState::HeliumState(double z, int omega, const std::vector<BasisIndex> &basis,
                         const Eigen::VectorXd &coeffs, StateExtent extent)
    : z_(z), omega_(omega), extent_(extent) {
  require(basis.size() == static_cast<std::size_t>(coeffs.size()),
          "HeliumState: basis and coefficient sizes differ");
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (const auto &p : expand(basis[a]))
      terms_.push_back({p.i, p.j, p.k, p.c * coeffs[static_cast<Eigen::Index>(a)]});
}

void HeliumState::values(double r1, double r2, std::span<const double> u,
                         std::span<double> out) const {
  const int n = omega_ + 1;
  double g1[64], g2[64], A[64], P[64];
  radial_functions(z_, r1, std::span<double>(g1, n));
  radial_functions(z_, r2, std::span<double>(g2, n));
  std::fill(A, A + n, 0.0);
  for (const auto &t : terms_)
    A[t.k] += t.c * g1[t.i] * g2[t.j];
  for (int k = 0; k < n; ++k)
    A[k] *= std::sqrt((2 * k + 1) / 2.0) / kTwoPi;
  for (std::size_t q = 0; q < u.size(); ++q) {
    numerics::legendre_table(cos_angle(r1, r2, u[q]), std::span<double>(P, n));
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      s += A[k] * P[k];
    out[q] = s;
  }
}

void HeliumState::derivatives(double r1, double r2, std::span<const double> u,
                              std::span<StateDerivs> out) const {
  const int n = omega_ + 1;
  double g1[64], d1[64], dd1[64], g2[64], d2[64], dd2[64];
  double A[64], A1[64], A2[64], AL[64], P[64], dP[64];
  radial_functions(z_, r1, std::span<double>(g1, n), std::span<double>(d1, n),
                   std::span<double>(dd1, n));
  radial_functions(z_, r2, std::span<double>(g2, n), std::span<double>(d2, n),
                   std::span<double>(dd2, n));
  std::fill(A, A + n, 0.0);
  std::fill(A1, A1 + n, 0.0);
  std::fill(A2, A2 + n, 0.0);
  std::fill(AL, AL + n, 0.0);
  for (const auto &t : terms_) {
    A[t.k] += t.c * g1[t.i] * g2[t.j];
    A1[t.k] += t.c * d1[t.i] * g2[t.j];
    A2[t.k] += t.c * g1[t.i] * d2[t.j];
    AL[t.k] += t.c * ((dd1[t.i] + 2.0 * d1[t.i] / r1) * g2[t.j] +
                      g1[t.i] * (dd2[t.j] + 2.0 * d2[t.j] / r2));
  }
  const double inv = 1.0 / (r1 * r1) + 1.0 / (r2 * r2);
  for (int k = 0; k < n; ++k) {
    const double th = std::sqrt((2 * k + 1) / 2.0) / kTwoPi;
    AL[k] = th * (AL[k] - k * (k + 1) * inv * A[k]);
    A[k] *= th;
    A1[k] *= th;
    A2[k] *= th;
  }
  for (std::size_t q = 0; q < u.size(); ++q) {
    numerics::legendre_table(cos_angle(r1, r2, u[q]), std::span<double>(P, n),
                             std::span<double>(dP, n));
    StateDerivs d;
    for (int k = 0; k < n; ++k) {
      d.value += A[k] * P[k];
      d.d_r1 += A1[k] * P[k];
      d.d_r2 += A2[k] * P[k];
      d.d_t += A[k] * dP[k];
      d.laplacian += AL[k] * P[k];
    }
    out[q] = d;
  }
}

RadialField compute_density(const HeliumSolution &solution, const GridPtr &r_grid) {
  require(r_grid != nullptr, "helium::compute_density: missing grid");
  const auto &st = dynamic_cast<const HeliumState &>(*solution.state);
  const int n = st.omega_basis() + 1;
  std::vector<double> g(n), acc(static_cast<std::size_t>(n) * n);
  std::vector<double> rho(r_grid->size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    rho[i] = density_at(st, r_grid->nodes[i], g, acc);
  RadialField field(r_grid, std::move(rho));
  const double norm = field.integrate_3d();
  if (std::abs(norm - 2.0) > 1e-6) {
    std::ostringstream os;
    os << "helium::compute_density: int rho = " << norm << " misses 2 (quadrature resolution)";
    throw NumericalError(os.str());
  }
  return field;
}

namespace {

double outer_radius(const HeliumState &st) {
  const int n = st.omega_basis() + 1;
  std::vector<double> g(n), acc(static_cast<std::size_t>(n) * n);
  const double s = 2.0 * st.z();
  const double rho0 = density_at(st, 0.0, g, acc);
  double x = 20.0;
  // walk outward until the density tail stays below 1e-17 rho(0)
  for (; x < 400.0; x += 1.0) {
    bool small = true;
    for (double dx = 0.0; dx <= 4.0 && small; dx += 0.5)
      small = density_at(st, (x + dx) / s, g, acc) < 1e-17 * rho0;
    if (small)
      break;
  }
  return x / s;
}

} // namespace

GridPtr default_density_grid(const HeliumSolution &solution) {
  const double r_max = solution.state->extent().outer;
  const double h = 0.01 / (2.0 * solution.spec.z);
  auto intervals = static_cast<std::size_t>(std::ceil(r_max / h));
  intervals += intervals % 2;
  return RadialGrid::uniform(r_max, intervals);
}

HeliumSolution from_coefficients(const HeliumSpec &spec, std::vector<BasisIndex> basis,
                                 Eigen::VectorXd coeffs, double e_total,
                                 EnergyComponents components) {
  validate(spec);
  HeliumSolution sol;
  sol.spec = spec;
  sol.basis = std::move(basis);
  sol.coeffs = std::move(coeffs);
  sol.e_total = e_total;
  sol.ionization = e_total + 0.5 * spec.z * spec.z;
  sol.components = components;
  auto probe = std::make_shared<HeliumState>(spec.z, spec.omega_basis, sol.basis, sol.coeffs,
                                             StateExtent{1.0 / spec.z, 40.0 / spec.z});
  const StateExtent extent{1.0 / spec.z, outer_radius(*probe)};
  sol.state = std::make_shared<HeliumState>(spec.z, spec.omega_basis, sol.basis, sol.coeffs, extent);
  sol.density = std::make_shared<const RadialField>(compute_density(sol, default_density_grid(sol)));
  return sol;
}

HeliumSolution solve(const HeliumSpec &spec_in) {
  validate(spec_in);
  HeliumSpec spec = spec_in;
  std::vector<std::string> warnings;
  if (spec.z <= 1.0 && spec.omega_basis < 10) {
    warnings.push_back("basis cutoff raised to 10 for z <= 1");
    spec.omega_basis = 10;
  }
  const HeliumMatrices m = build_matrices(spec);
  const auto eig = numerics::eig_sym_dense(m.hamiltonian);
  Eigen::VectorXd c = eig.vectors.col(0);
  if (c[0] < 0.0)
    c = -c;
  EnergyComponents comp;
  comp.kinetic = c.dot(m.kinetic * c);
  comp.external = c.dot(m.nuclear * c);
  comp.interaction = spec.lambda * c.dot(m.repulsion * c);
  auto sol = from_coefficients(spec, m.basis, c, eig.values[0], comp);
  if (sol.e_total > -0.5 * spec.z * spec.z) {
    std::ostringstream os;
    os << "e_total " << sol.e_total << " lies above the one-electron threshold "
       << -0.5 * spec.z * spec.z << " (unbound in this basis)";
    warnings.push_back(os.str());
  }
  sol.warnings = std::move(warnings);
  return sol;
}

SystemRecord to_record(const HeliumSolution &solution) {
  SystemRecord rec;
  rec.family = Family::helium;
  rec.param = solution.spec.z;
  rec.interaction_scale = solution.spec.lambda;
  rec.e_total = solution.e_total;
  rec.e_remnant = -0.5 * solution.spec.z * solution.spec.z;
  rec.components = solution.components;
  rec.density = solution.density;
  rec.state = solution.state;
  const double z = solution.spec.z;
  rec.potential = [z](double r) { return -z / r; };
  return rec;
}

} // namespace metricdft::helium
