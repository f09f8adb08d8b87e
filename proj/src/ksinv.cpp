#include "metricdft/ksinv.hpp"

#include "metricdft/error.hpp"
#include "metricdft/numerics/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace metricdft::ksinv {

using numerics::CubicSpline;
using numerics::RadialField;

namespace {

constexpr double kFloor = 1e-12;

// Lowest eigenpair of -u''/2 + v u on interior nodes 1..last-1 with spacing
// `stride` * h. Returns eigenvalue and u at every stride-th node (zero ends).
std::pair<double, std::vector<double>> radial_eigen(const KsPotential &v, const RadialField &orbital,
                                                    std::size_t stride) {
  const auto &g = orbital.grid();
  const double h = g.spacing() * static_cast<double>(stride);
  const std::size_t n = (g.size() - 1) / stride;
  std::vector<double> diag(n - 1), off(n - 2, -0.5 / (h * h)), w(n - 1, h);
  for (std::size_t i = 1; i < n; ++i)
    diag[i - 1] = 1.0 / (h * h) + v(g.nodes[i * stride]);
  auto e = numerics::lowest_eigenpairs_tridiag(diag, off, 1, w);
  std::vector<double> u(n + 1, 0.0);
  std::copy(e.vectors[0].begin(), e.vectors[0].end(), u.begin() + 1);
  return {e.values[0], std::move(u)};
}

} // namespace

TailModel tail_for(Family family) {
  return family == Family::hooke ? TailModel::harmonic : TailModel::coulomb;
}

RadialField ks_orbital(const RadialField &density) {
  std::vector<double> phi(density.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double rho = density[i];
    if (rho < -1e-12) {
      std::ostringstream os;
      os << "ks_orbital: negative density " << rho << " at r = " << density.grid().nodes[i];
      throw ContractViolation(os.str());
    }
    phi[i] = std::sqrt(std::max(rho, 0.0) / 2.0);
  }
  return RadialField(density.grid_ptr(), std::move(phi));
}

double ks_eigenvalue(const SystemRecord &system) {
  require(std::isfinite(system.e_total) && std::isfinite(system.e_remnant),
          "ks_eigenvalue: system energies missing");
  return system.e_total - system.e_remnant;
}

double KsPotential::operator()(double r) const {
  if (r > valid_r_max) {
    if (tail == TailModel::coulomb)
      return tail_a / r;
    return tail_a + tail_b * r * r;
  }
  if (r > 0.0)
    return (*spline_)(r) / r;
  double f, df, d2f;
  spline_->evaluate(0.0, f, df, d2f);
  if (std::abs(f) < 1e-9)
    return df;
  return f < 0.0 ? -std::numeric_limits<double>::infinity()
                 : std::numeric_limits<double>::infinity();
}

KsPotential ks_potential(const RadialField &orbital, double eps_ks, TailModel tail) {
  require(std::isfinite(eps_ks), "ks_potential: eps_ks must be finite");
  const auto &g = orbital.grid();
  require(g.kind == numerics::GridKind::uniform && g.nodes.front() == 0.0,
          "ks_potential: orbital must sit on a uniform grid starting at r = 0");
  const std::size_t n = g.size();
  double peak = 0.0;
  for (double p : orbital.values())
    peak = std::max(peak, p * p);
  // last node of the valid region, phi^2 > floor * max phi^2
  std::size_t last = n;
  for (std::size_t i = n; i-- > 0;)
    if (orbital[i] * orbital[i] > kFloor * peak) {
      last = i;
      break;
    }
  if (last == n || last < 8)
    throw NumericalError("ks_potential: density floor reached everywhere (degenerate input)");

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = g.nodes[i] * orbital[i];
  const auto upp = numerics::second_derivative(u, g.spacing());
  // r v(r) on [0, r_last]; at r = 0, (r phi)'' = 2 phi'(0) so r v -> phi'(0)/phi(0)
  std::vector<double> rv(last + 1), x(last + 1);
  rv[0] = 0.5 * upp[0] / orbital[0];
  for (std::size_t i = 1; i <= last; ++i)
    rv[i] = g.nodes[i] * eps_ks + 0.5 * upp[i] / orbital[i];
  for (std::size_t i = 0; i <= last; ++i)
    x[i] = g.nodes[i];

  KsPotential out;
  out.valid_r_max = g.nodes[last];
  out.tail = tail;
  out.spline_ = std::make_shared<const CubicSpline>(x, rv);
  if (tail == TailModel::coulomb) {
    out.tail_a = rv[last];
  } else {
    const std::size_t back = std::min<std::size_t>(20, last / 2);
    const double r1 = g.nodes[last], r2 = g.nodes[last - back];
    const double v1 = rv[last] / r1, v2 = rv[last - back] / r2;
    out.tail_b = (v1 - v2) / (r1 * r1 - r2 * r2);
    out.tail_a = v1 - out.tail_b * r1 * r1;
  }
  std::vector<double> v(n), rvf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.nodes[i];
    rvf[i] = i <= last ? rv[i] : r * out(r);
    v[i] = i == 0 ? out(0.0) : out(r);
  }
  if (!std::isfinite(v[0]))
    v[0] = v[1];
  out.v_ks = RadialField(orbital.grid_ptr(), std::move(v));
  out.r_v = RadialField(orbital.grid_ptr(), std::move(rvf));
  return out;
}

RoundTrip round_trip(const KsPotential &v_ks, const RadialField &orbital) {
  const auto &g = orbital.grid();
  require(g.size() >= 64, "round_trip: grid too small");
  // even number of intervals so the coarse grid shares the end node
  const std::size_t intervals = g.size() - 1;
  require(intervals % 2 == 0, "round_trip: need an even number of grid intervals");
  auto [e1, u1] = radial_eigen(v_ks, orbital, 1);
  auto [e2, u2] = radial_eigen(v_ks, orbital, 2);
  RoundTrip rt;
  rt.eigenvalue = (4.0 * e1 - e2) / 3.0;
  // overlap of u = r phi normalized as int u^2 dr = 1
  double uu = 0.0, pp = 0.0, up = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.weights[i];
    const double p = g.nodes[i] * orbital[i];
    uu += w * u1[i] * u1[i];
    pp += w * p * p;
    up += w * u1[i] * p;
  }
  rt.overlap = std::abs(up) / std::sqrt(uu * pp);
  return rt;
}

KsSystem ks_two_electron(RadialField orbital, KsPotential v_ks, double eps_ks, DensityPtr density,
                         StateExtent extent) {
  KsSystem ks;
  ks.eps_ks = eps_ks;
  ks.e_ks_total = 2.0 * eps_ks;
  ks.valid_r_max = v_ks.valid_r_max;
  const auto &g = orbital.grid();
  ks.state = std::make_shared<ProductState>(
      CubicSpline(g.nodes, {orbital.values().begin(), orbital.values().end()}), extent);
  ks.orbital = std::move(orbital);
  ks.potential = std::move(v_ks);
  ks.density = std::move(density);
  return ks;
}

KsSystem invert(const SystemRecord &mb) {
  require(mb.density && mb.state, "ksinv::invert: system lacks density or state");
  const double eps = ks_eigenvalue(mb);
  auto phi = ks_orbital(*mb.density);
  const double norm = phi.grid().nodes.empty() ? 0.0 : [&] {
    std::vector<double> sq(phi.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
      sq[i] = phi[i] * phi[i];
    return RadialField(phi.grid_ptr(), std::move(sq)).integrate_3d();
  }();
  require(std::abs(norm - 1.0) < 1e-6, "ksinv::invert: density does not integrate to 2");
  auto v = ks_potential(phi, eps, tail_for(mb.family));
  auto ks = ks_two_electron(phi, std::move(v), eps, mb.density, mb.state->extent());
  ks.round_trip = round_trip(ks.potential, ks.orbital);
  return ks;
}

SystemRecord to_record(const KsSystem &ks, const SystemRecord &source) {
  SystemRecord rec;
  rec.family = source.family;
  rec.kohn_sham = true;
  rec.param = source.param;
  rec.interaction_scale = 0.0;
  rec.e_total = ks.e_ks_total;
  rec.e_remnant = ks.eps_ks;
  rec.density = ks.density;
  rec.state = ks.state;
  rec.potential = [p = ks.potential](double r) { return p(r); };
  return rec;
}

} // namespace metricdft::ksinv
