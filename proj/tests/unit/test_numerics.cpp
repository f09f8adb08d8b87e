#include <catch_amalgamated.hpp>

#include "metricdft/error.hpp"
#include "metricdft/numerics/eigen.hpp"
#include "metricdft/numerics/grid.hpp"
#include "metricdft/numerics/polynomials.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace metricdft;
using namespace metricdft::numerics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Explicit series L_n^(a)(x) = sum_k (-1)^k C(n+a, n-k) x^k / k!
double laguerre_series(int n, int a, double x) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double binom = std::exp(std::lgamma(n + a + 1.0) - std::lgamma(n - k + 1.0) -
                                  std::lgamma(a + k + 1.0));
    s += (k % 2 ? -1.0 : 1.0) * binom * std::pow(x, k) / std::tgamma(k + 1.0);
  }
  return s;
}

// det(A - xI) by partial-pivot elimination.
double char_poly(const Eigen::MatrixXd &a, double x) {
  Eigen::MatrixXd m = a - x * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return m.partialPivLu().determinant();
}

} // namespace

TEST_CASE("laguerre examples", "[numerics]") {
  CHECK(laguerre_gen(0, 2, 7.3) == 1.0);
  CHECK_THAT(laguerre_gen(1, 2, 1.0), WithinAbs(2.0, 1e-15));
  CHECK_THAT(laguerre_gen(2, 2, 2.0), WithinAbs((4.0 - 16.0 + 12.0) / 2.0, 1e-14));
  CHECK_THROWS_AS(laguerre_gen(-1, 2, 1.0), ContractViolation);
}

TEST_CASE("laguerre recurrence agrees with explicit series", "[numerics]") {
  for (int a = 0; a <= 2; ++a)
    for (int n = 0; n <= 12; ++n)
      for (double x : {0.0, 0.3, 1.7, 5.0, 11.0}) {
        const double ref = laguerre_series(n, a, x);
        CHECK_THAT(laguerre_gen(n, a, x), WithinAbs(ref, 1e-9 * std::max(1.0, std::abs(ref))));
      }
  // d/dx L_n^(a) = -L_{n-1}^(a+1), checked by central difference
  for (int n = 1; n <= 8; ++n) {
    const double x = 2.3, h = 1e-5;
    const double fd = (laguerre_gen(n, 2, x + h) - laguerre_gen(n, 2, x - h)) / (2 * h);
    CHECK_THAT(laguerre_gen_derivative(n, 2, x), WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
  }
}

TEST_CASE("legendre examples", "[numerics]") {
  CHECK(legendre(0, -0.4) == 1.0);
  CHECK_THAT(legendre(1, 0.7), WithinAbs(0.7, 1e-15));
  CHECK_THAT(legendre(2, 0.5), WithinAbs((3 * 0.25 - 1) / 2, 1e-15));
  CHECK_THROWS_AS(legendre(2, 1.2), ContractViolation);
  for (double t : {-0.9, -0.2, 0.35, 0.8}) {
    const double p3 = (5 * t * t * t - 3 * t) / 2;
    CHECK_THAT(legendre(3, t), WithinAbs(p3, 1e-14));
    CHECK_THAT(legendre_derivative(3, t), WithinAbs((15 * t * t - 3) / 2, 1e-13));
  }
}

TEST_CASE("gauss rule examples", "[numerics]") {
  auto r1 = gauss_rule(WeightKind::legendre, 1);
  CHECK_THAT(r1.nodes[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(r1.weights[0], WithinAbs(2.0, 1e-15));
  auto l1 = gauss_rule(WeightKind::laguerre, 1, 2);
  CHECK_THAT(l1.nodes[0], WithinAbs(3.0, 1e-13));
  CHECK_THAT(l1.weights[0], WithinAbs(2.0, 1e-13));
  auto r2 = gauss_rule(WeightKind::legendre, 2);
  CHECK_THAT(r2.nodes[0], WithinAbs(-1.0 / std::sqrt(3.0), 1e-10));
  CHECK_THAT(r2.nodes[1], WithinAbs(1.0 / std::sqrt(3.0), 1e-10));
  CHECK_THAT(r2.weights[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(r2.weights[1], WithinAbs(1.0, 1e-14));
}

TEST_CASE("gauss legendre moments up to degree 2n-1", "[numerics][property]") {
  for (int n = 1; n <= 64; ++n) {
    const auto rule = gauss_rule(WeightKind::legendre, n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        s += rule.weights[i] * std::pow(rule.nodes[i], d);
      const double exact = (d % 2) ? 0.0 : 2.0 / (d + 1);
      CHECK_THAT(s, WithinAbs(exact, 1e-12 * std::max(1.0, exact)));
    }
    for (double w : rule.weights)
      CHECK(w > 0.0);
  }
}

TEST_CASE("gauss laguerre moments up to degree 2n-1", "[numerics][property]") {
  // Moments x^d against x^a e^-x equal (d+a)!; compared relative to the
  // quadrature's own magnitude sum because terms span many decades.
  for (int a = 0; a <= 2; ++a)
    for (int n = 1; n <= 64; ++n) {
      const auto rule = gauss_rule(WeightKind::laguerre, n, a);
      for (int d = 0; d <= 2 * n - 1; ++d) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < rule.size(); ++i)
          s += rule.weights[i] * std::pow(static_cast<long double>(rule.nodes[i]), d);
        const double exact = std::tgamma(d + a + 1.0);
        CHECK_THAT(static_cast<double>(s), WithinRel(exact, 1e-12 * std::max(1.0, 0.1 * d)));
      }
      for (double w : rule.weights)
        CHECK(w > 0.0);
    }
}

TEST_CASE("laguerre basis orthonormality", "[numerics][property]") {
  const auto rule = gauss_rule(WeightKind::laguerre, 40, 2);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * laguerre_gen(i, 2, rule.nodes[q]) * laguerre_gen(j, 2, rule.nodes[q]);
      s /= std::sqrt((i + 1.0) * (i + 2.0) * (j + 1.0) * (j + 2.0));
      CHECK_THAT(s, WithinAbs(i == j ? 1.0 : 0.0, 1e-10));
    }
}

TEST_CASE("finite interval rules reproduce length", "[numerics][property]") {
  auto g = RadialGrid::panels(geometric_breaks(0.01, 37.0, 1.4), 16);
  CHECK_THAT(std::accumulate(g->weights.begin(), g->weights.end(), 0.0), WithinRel(37.0, 1e-12));
  auto u = RadialGrid::uniform(12.5, 1000);
  CHECK_THAT(std::accumulate(u->weights.begin(), u->weights.end(), 0.0), WithinRel(12.5, 1e-12));
  for (std::size_t i = 1; i < g->size(); ++i)
    CHECK(g->nodes[i] > g->nodes[i - 1]);
}

TEST_CASE("second derivative examples", "[numerics]") {
  auto grid = RadialGrid::uniform(3.0, 300);
  std::vector<double> sq, c, s;
  for (double r : grid->nodes) {
    sq.push_back(r * r);
    c.push_back(4.2);
    s.push_back(std::sin(r));
  }
  auto d_sq = second_derivative(RadialField(grid, sq));
  auto d_c = second_derivative(RadialField(grid, c));
  auto d_s = second_derivative(RadialField(grid, s));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK_THAT(d_sq[i], WithinAbs(2.0, 1e-8));
    CHECK_THAT(d_c[i], WithinAbs(0.0, 1e-8));
    CHECK_THAT(d_s[i], WithinAbs(-std::sin(grid->nodes[i]), 1e-6));
  }
  auto panel = RadialGrid::panels({0.0, 1.0, 2.0}, 8);
  CHECK_THROWS_AS(second_derivative(RadialField(panel, std::vector<double>(panel->size(), 1.0))),
                  ContractViolation);
}

TEST_CASE("second derivative then double integration recovers input", "[numerics][property]") {
  // Integrate f'' twice with Simpson-like cumulative sums and fix the affine
  // part from the endpoints; the residual should shrink as h^4.
  auto residual = [](std::size_t n) {
    auto grid = RadialGrid::uniform(2.0, n);
    const double h = grid->spacing();
    std::vector<double> f;
    for (double r : grid->nodes)
      f.push_back(std::exp(-r) * std::cos(2 * r));
    auto d2 = second_derivative(f, h);
    // cumulative trapezoid with end correction (fourth order)
    auto cumulate = [&](const std::vector<double> &g, const std::vector<double> &dg) {
      std::vector<double> out(g.size(), 0.0);
      for (std::size_t i = 1; i < g.size(); ++i)
        out[i] = out[i - 1] + h * (g[i] + g[i - 1]) / 2 - h * h * (dg[i] - dg[i - 1]) / 12;
      return out;
    };
    // exact third derivative for the end correction of the first pass
    std::vector<double> d3(d2.size());
    for (std::size_t i = 0; i < d2.size(); ++i) {
      const double r = grid->nodes[i];
      d3[i] = std::exp(-r) * (11 * std::cos(2 * r) + 2 * std::sin(2 * r));
    }
    auto d1 = cumulate(d2, d3);
    auto f0 = cumulate(d1, d2);
    const double a = f[0] - f0[0];
    const double b = (f.back() - f0.back() - a) / 2.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::abs(f0[i] + a + b * grid->nodes[i] - f[i]));
    return worst;
  };
  const double e1 = residual(100), e2 = residual(200);
  CHECK(e1 < 1e-6);
  CHECK(e2 < e1 / 10.0); // close to 16 for O(h^4)
}

TEST_CASE("tridiagonal eigen examples", "[numerics]") {
  std::vector<double> d{1, 1, 1}, o{0, 0};
  auto e = eig_sym_tridiag(d, o);
  for (double v : e.values)
    CHECK_THAT(v, WithinAbs(1.0, 1e-14));
  std::vector<double> d2{0, 0}, o2{1};
  auto x = eig_sym_tridiag(d2, o2);
  CHECK_THAT(x.values[0], WithinAbs(-1.0, 1e-14));
  CHECK_THAT(x.values[1], WithinAbs(1.0, 1e-14));
  CHECK(x.vectors[0][0] > 0.0);
  CHECK_THROWS_AS(eig_sym_tridiag(std::vector<double>{1.0}, std::vector<double>{}), ContractViolation);
}

TEST_CASE("half-line oscillator odd sector", "[numerics]") {
  const std::size_t n = 4000;
  const double L = 10.0, h = L / n;
  std::vector<double> d(n - 1), o(n - 2, -0.5 / (h * h)), w(n - 1, h);
  for (std::size_t i = 0; i < n - 1; ++i) {
    const double r = (i + 1) * h;
    d[i] = 1.0 / (h * h) + 0.5 * r * r;
  }
  auto bis = lowest_eigenpairs_tridiag(d, o, 2, w);
  CHECK_THAT(bis.values[0], WithinAbs(1.5, 1e-5));
  CHECK_THAT(bis.values[1], WithinAbs(3.5, 1e-5));
  double norm = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    norm += w[i] * bis.vectors[0][i] * bis.vectors[0][i];
  CHECK_THAT(norm, WithinAbs(1.0, 1e-12));
  // QL on a smaller copy agrees with bisection
  const std::size_t m = 400;
  const double hm = L / m;
  std::vector<double> dm(m - 1), om(m - 2, -0.5 / (hm * hm));
  for (std::size_t i = 0; i < m - 1; ++i)
    dm[i] = 1.0 / (hm * hm) + 0.5 * std::pow((i + 1) * hm, 2);
  auto ql = eig_sym_tridiag(dm, om);
  auto bs = lowest_eigenpairs_tridiag(dm, om, 3);
  for (int k = 0; k < 3; ++k)
    CHECK_THAT(bs.values[k], WithinAbs(ql.values[k], 1e-10));
  CHECK(sturm_count(dm, om, 1.6) == 1);
}

TEST_CASE("dense eigen examples", "[numerics]") {
  Eigen::MatrixXd a = Eigen::Vector3d(3, 1, 2).asDiagonal();
  auto e = eig_sym_dense(a);
  CHECK_THAT(e.values[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(e.values[1], WithinAbs(2.0, 1e-14));
  CHECK_THAT(e.values[2], WithinAbs(3.0, 1e-14));
  Eigen::MatrixXd b(2, 2);
  b << 2, 1, 1, 2;
  auto f = eig_sym_dense(b);
  CHECK_THAT(f.values[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(f.values[1], WithinAbs(3.0, 1e-14));
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 0, 1;
  CHECK_THROWS_AS(eig_sym_dense(c), ContractViolation);
}

TEST_CASE("dense eigen matches characteristic polynomial roots", "[numerics]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j <= i; ++j)
      a(i, j) = a(j, i) = uni(rng);
  const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  std::vector<double> roots;
  const int scan = 20000;
  double x0 = -bound, p0 = char_poly(a, x0);
  for (int s = 1; s <= scan; ++s) {
    const double x1 = -bound + 2.0 * bound * s / scan;
    const double p1 = char_poly(a, x1);
    if ((p0 < 0) != (p1 < 0)) {
      double lo = x0, hi = x1, plo = p0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pm = char_poly(a, mid);
        if ((pm < 0) == (plo < 0)) {
          lo = mid;
          plo = pm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    p0 = p1;
  }
  REQUIRE(roots.size() == 8);
  auto e = eig_sym_dense(a);
  for (int k = 0; k < 8; ++k)
    CHECK_THAT(e.values[k], WithinAbs(roots[k], 1e-9));
  Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cubic spline reproduces cubics and squares exactly", "[numerics]") {
  std::vector<double> x, y;
  for (int i = 0; i <= 50; ++i) {
    x.push_back(0.1 * i);
    y.push_back(std::sin(0.1 * i));
  }
  CubicSpline s(x, y);
  CHECK_THAT(s(1.234), WithinAbs(std::sin(1.234), 1e-5));
  CHECK(s(7.0) == 0.0);
  // integral of square against a fine composite rule
  double ref = 0.0;
  auto q = PanelQuadrature(std::vector<double>(x.begin(), x.end()), 8);
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    ref += q.weights[i] * s(q.nodes[i]) * s(q.nodes[i]);
  CHECK_THAT(s.integral_of_square(), WithinRel(ref, 1e-13));
}

TEST_CASE("monotone interpolation", "[numerics]") {
  std::vector<double> x{0, 1, 2, 3}, y{0, 1, 1, 5};
  CHECK_THAT(monotone_interpolate(x, y, 1.5), WithinAbs(1.0, 1e-14));
  CHECK_THAT(monotone_interpolate(x, y, 2.0), WithinAbs(1.0, 1e-14));
  CHECK_THROWS_AS(monotone_interpolate(x, y, 3.5), NumericalError);
}
