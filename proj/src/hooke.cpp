#include "metricdft/hooke.hpp"

#include "metricdft/error.hpp"
#include "metricdft/numerics/eigen.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace metricdft::hooke {

using numerics::CubicSpline;
using numerics::GridPtr;
using numerics::RadialField;
using numerics::RadialGrid;

namespace {

constexpr double kPi = std::numbers::pi;

struct FdEigen {
  double eps;
  std::vector<double> chi; // nodes 0..n including both zero endpoints
};

FdEigen fd_lowest(const HookeSpec &spec, std::size_t n, double u_max) {
  const double h = u_max / static_cast<double>(n);
  const std::size_t m = n - 1;
  std::vector<double> diag(m), off(m - 1, -1.0 / (h * h)), w(m, h);
  const double w2 = 0.25 * spec.omega * spec.omega;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = static_cast<double>(i + 1) * h;
    diag[i] = 2.0 / (h * h) + w2 * u * u + spec.lambda / u;
  }
  auto e = numerics::lowest_eigenpairs_tridiag(diag, off, 1, w);
  FdEigen out{e.values[0], std::vector<double>(n + 1, 0.0)};
  std::copy(e.vectors[0].begin(), e.vectors[0].end(), out.chi.begin() + 1);
  return out;
}

double max_abs(const std::vector<double> &v) {
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

// Sum over knot intervals of 4-point Gauss-Legendre of f(u, chi, chi').
template <class F>
double integrate_chi(const CubicSpline &chi, F &&f) {
  const auto &rule = numerics::gauss_legendre(4);
  const auto x = chi.knots();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double half = 0.5 * (x[i + 1] - x[i]), mid = 0.5 * (x[i + 1] + x[i]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double u = mid + half * rule.nodes[q];
      double c, dc, ddc;
      chi.evaluate(u, c, dc, ddc);
      total += half * rule.weights[q] * f(u, c, dc);
    }
  }
  return total;
}

double effective_range(const RadialField &chi) {
  const auto v = chi.values();
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  std::size_t last = v.size() - 1;
  while (last > 0 && std::abs(v[last]) <= 1e-10 * m)
    --last;
  return chi.grid().nodes[std::min(last + 1, v.size() - 1)];
}

} // namespace

void validate(const HookeSpec &spec) {
  require(std::isfinite(spec.omega) && spec.omega > 0.0, "hooke: omega must be > 0");
  require(spec.lambda >= 0.0 && spec.lambda <= 1.0, "hooke: lambda must lie in [0, 1]");
}

double auto_u_max(double omega) {
  return std::max(25.0, 12.0 / std::sqrt(omega) + 10.0 * std::pow(omega, -0.25));
}

RelativeSolution solve_relative(const HookeSpec &spec, std::size_t grid_n, double u_max) {
  validate(spec);
  require(grid_n >= 512, "solve_relative: grid_n must be >= 512");
  require(grid_n % 2 == 0, "solve_relative: grid_n must be even");
  require(u_max > 0.0, "solve_relative: u_max must be > 0");

  const FdEigen fine = fd_lowest(spec, grid_n, u_max);
  const double peak = max_abs(fine.chi);
  const double edge = std::abs(fine.chi[grid_n - 1]);
  if (edge > 1e-8 * peak) {
    std::ostringstream os;
    os << "solve_relative: domain too small, chi(u_max - h) = " << edge / peak
       << " of max at u_max = " << u_max;
    throw NumericalError(os.str());
  }
  const FdEigen coarse = fd_lowest(spec, grid_n / 2, u_max);
  const double change = std::abs(fine.eps - coarse.eps) / std::abs(fine.eps);
  if (!(change < 1e-6)) {
    std::ostringstream os;
    os << "solve_relative: Richardson check failed at grid_n = " << grid_n
       << " (relative change " << change << ")";
    throw NumericalError(os.str());
  }

  // h^2 extrapolation of eigenvalue and eigenvector on the coarse nodes
  const std::size_t nc = grid_n / 2;
  std::vector<double> chi(nc + 1);
  for (std::size_t i = 0; i <= nc; ++i)
    chi[i] = (4.0 * fine.chi[2 * i] - coarse.chi[i]) / 3.0;
  auto grid = RadialGrid::uniform(u_max, nc);
  CubicSpline spline(grid->nodes, chi);
  const double s = 1.0 / std::sqrt(spline.integral_of_square());
  for (auto &c : chi)
    c *= s;

  RelativeSolution out;
  out.eps_rel = (4.0 * fine.eps - coarse.eps) / 3.0;
  out.rel_orbital = RadialField(grid, std::move(chi));
  out.grid_n = grid_n;
  out.richardson_change = change;
  return out;
}

GridPtr default_density_grid(const RadialField &rel_orbital, double omega,
                             std::size_t intervals) {
  const double r_max = 0.5 * effective_range(rel_orbital) + 5.0 / std::sqrt(omega);
  return RadialGrid::uniform(r_max, intervals);
}

HookeState::HookeState(double omega, CubicSpline chi, StateExtent extent)
    : omega_(omega),
      prefactor_(std::numbers::sqrt2 * std::pow(2.0 * omega / kPi, 0.75) /
                 std::sqrt(4.0 * kPi)),
      chi_(std::move(chi)), extent_(extent) {}

void HookeState::values(double r1, double r2, std::span<const double> u,
                        std::span<double> out) const {
  const double s = 2.0 * (r1 * r1 + r2 * r2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = u[k];
    const double R2 = std::max(0.0, (s - uk * uk) / 4.0);
    double ratio;
    if (uk < 1e-10) {
      double c, dc, ddc;
      chi_.evaluate(0.0, c, dc, ddc);
      ratio = dc;
    } else {
      ratio = chi_(uk) / uk;
    }
    out[k] = prefactor_ * std::exp(-omega_ * R2) * ratio;
  }
}

void HookeState::derivatives(double r1, double r2, std::span<const double> u,
                             std::span<StateDerivs> out) const {
  const double s = 2.0 * (r1 * r1 + r2 * r2);
  double c0, dc0, ddc0;
  chi_.evaluate(0.0, c0, dc0, ddc0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = std::max(u[k], 1e-12);
    const double u2 = uk * uk;
    const double R2 = std::max(0.0, (s - u2) / 4.0);
    const double g = prefactor_ * std::exp(-omega_ * R2);
    double c, dc, ddc;
    chi_.evaluate(uk, c, dc, ddc);
    const double kk = c / uk;
    // chi'' from the relative equation keeps the 1/u cusp exact
    const double chi2 = (0.25 * omega_ * omega_ * u2 + lambda_ / uk - eps_) * c;
    const double dk = uk > 1e-5 ? (dc * uk - c) / u2 : 0.5 * lambda_ * dc0;
    // partials of R^2 and u with respect to r1, r2, t at fixed remaining pair
    const double dR2_r1 = (3.0 * r1 * r1 + r2 * r2 - u2) / (4.0 * r1);
    const double dR2_r2 = (3.0 * r2 * r2 + r1 * r1 - u2) / (4.0 * r2);
    const double du_r1 = (r1 * r1 - r2 * r2 + u2) / (2.0 * r1 * uk);
    const double du_r2 = (r2 * r2 - r1 * r1 + u2) / (2.0 * r2 * uk);
    const double dR2_t = 0.5 * r1 * r2;
    const double du_t = -r1 * r2 / uk;
    StateDerivs &d = out[k];
    d.value = g * kk;
    d.d_r1 = g * (-omega_ * dR2_r1 * kk + dk * du_r1);
    d.d_r2 = g * (-omega_ * dR2_r2 * kk + dk * du_r2);
    d.d_t = g * (-omega_ * dR2_t * kk + dk * du_t);
    d.laplacian = g * (0.5 * (4.0 * omega_ * omega_ * R2 - 6.0 * omega_) * kk + 2.0 * chi2 / uk);
  }
}

RadialField compute_density(const HookeSolution &solution, const GridPtr &r_grid) {
  require(r_grid && r_grid->kind == numerics::GridKind::uniform,
          "hooke::compute_density: r_grid must be uniform");
  const double omega = solution.spec.omega;
  const auto &chi_field = solution.rel_orbital;
  CubicSpline chi(std::vector<double>(chi_field.grid().nodes), 
                  std::vector<double>(chi_field.values().begin(), chi_field.values().end()));
  const double u_eff = effective_range(chi_field);
  const double width = std::min(u_eff / 64.0, 0.25 / std::sqrt(omega));
  const std::size_t panels = static_cast<std::size_t>(std::ceil(u_eff / width));
  std::vector<double> breaks(panels + 1);
  for (std::size_t p = 0; p <= panels; ++p)
    breaks[p] = u_eff * static_cast<double>(p) / static_cast<double>(panels);
  numerics::PanelQuadrature quad(breaks, 16);
  std::vector<double> cw(quad.nodes.size());
  for (std::size_t j = 0; j < cw.size(); ++j) {
    const double c = chi(quad.nodes[j]);
    cw[j] = quad.weights[j] * c * c;
  }
  const double pref = 2.0 * std::pow(2.0 * omega / kPi, 1.5);
  std::vector<double> rho(r_grid->size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = r_grid->nodes[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < cw.size(); ++j) {
      const double u = quad.nodes[j];
      const double a = 2.0 * omega * r * u;
      const double d = r - 0.5 * u;
      const double shell = a < 1e-300 ? 1.0 : -std::expm1(-2.0 * a) / (2.0 * a);
      acc += cw[j] * std::exp(-2.0 * omega * d * d) * shell;
    }
    rho[i] = pref * acc;
  }
  RadialField field(r_grid, std::move(rho));
  const double norm = field.integrate_3d();
  if (std::abs(norm - 2.0) > 1e-6) {
    std::ostringstream os;
    os << "hooke::compute_density: int rho = " << norm << " misses 2 (quadrature resolution)";
    throw NumericalError(os.str());
  }
  return field;
}

HookeSolution from_relative(const HookeSpec &spec, double eps_rel, RadialField rel_orbital,
                            std::size_t density_intervals) {
  validate(spec);
  HookeSolution sol;
  sol.spec = spec;
  sol.eps_rel = eps_rel;
  sol.e_com = 1.5 * spec.omega;
  sol.e_total = eps_rel + sol.e_com;
  sol.ionization = eps_rel;
  sol.rel_orbital = std::move(rel_orbital);

  CubicSpline chi(std::vector<double>(sol.rel_orbital.grid().nodes),
                  std::vector<double>(sol.rel_orbital.values().begin(),
                                      sol.rel_orbital.values().end()));
  const double omega = spec.omega;
  const double t_rel = integrate_chi(chi, [](double, double, double dc) { return dc * dc; });
  const double u2 = integrate_chi(chi, [](double u, double c, double) { return c * c * u * u; });
  const double inv_u = integrate_chi(chi, [](double u, double c, double) { return u > 0.0 ? c * c / u : 0.0; });
  sol.components.kinetic = 0.75 * omega + t_rel;
  sol.components.external = 0.75 * omega + 0.25 * omega * omega * u2;
  sol.components.interaction = spec.lambda * inv_u;

  auto grid = default_density_grid(sol.rel_orbital, omega, density_intervals);
  StateExtent extent{std::min(1.0, 1.0 / std::sqrt(omega)), grid->back()};
  auto state = std::make_shared<HookeState>(omega, chi, extent);
  state->set_relative_energy(spec.lambda, eps_rel);
  sol.state = state;
  sol.density = std::make_shared<const RadialField>(compute_density(sol, grid));
  return sol;
}

HookeSolution assemble_solution(const HookeSpec &spec, const HookeOptions &options) {
  validate(spec);
  const double u_max = options.u_max > 0.0 ? options.u_max : auto_u_max(spec.omega);
  std::size_t n = options.grid_n;
  for (;;) {
    try {
      auto rel = solve_relative(spec, n, u_max);
      return from_relative(spec, rel.eps_rel, std::move(rel.rel_orbital),
                           options.density_intervals);
    } catch (const NumericalError &e) {
      const std::string what = e.what();
      if (what.find("Richardson") == std::string::npos || 2 * n > options.max_grid_n)
        throw;
      n *= 2;
    }
  }
}

SystemRecord to_record(const HookeSolution &solution) {
  SystemRecord rec;
  rec.family = Family::hooke;
  rec.param = solution.spec.omega;
  rec.interaction_scale = solution.spec.lambda;
  rec.e_total = solution.e_total;
  rec.e_remnant = solution.e_com;
  rec.components = solution.components;
  rec.density = solution.density;
  rec.state = solution.state;
  const double w = solution.spec.omega;
  rec.potential = [w](double r) { return 0.5 * w * w * r * r; };
  return rec;
}

} // namespace metricdft::hooke
