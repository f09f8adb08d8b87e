#include "metricdft/metrics.hpp"

#include "metricdft/error.hpp"
#include "metricdft/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace metricdft::metrics {

using numerics::RadialField;
using numerics::RadialGrid;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_gauge(double e, const GaugeContext &gauge, const char *who) {
  if (e + gauge.c < -1e-9 * std::max(1.0, std::abs(e))) {
    std::ostringstream os;
    os << who << ": gauge violation, E + c = " << e + gauge.c << " < 0";
    throw ContractViolation(os.str());
  }
}

// Density value at r with zero beyond the last node.
class Sampler {
public:
  explicit Sampler(const RadialField &f) : f_(f) {}
  double operator()(double r) const {
    const auto &x = f_.grid().nodes;
    if (r > x.back())
      return 0.0;
    if (r <= x.front())
      return f_[0];
    return numerics::monotone_interpolate(x, f_.values(), r);
  }

private:
  const RadialField &f_;
};

bool same_samples(const RadialField &a, const RadialField &b) {
  return &a == &b || (a.grid().nodes == b.grid().nodes &&
                      std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
}

double min_spacing(const RadialGrid &g) {
  double h = g.nodes.back() - g.nodes.front();
  for (std::size_t i = 1; i < g.size(); ++i)
    h = std::min(h, g.nodes[i] - g.nodes[i - 1]);
  return h;
}

double max_spacing(const RadialGrid &g) {
  double h = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i)
    h = std::max(h, g.nodes[i] - g.nodes[i - 1]);
  return h;
}

// Breaks graded from the finest grid spacing, panel width capped at the
// coarsest one, ending at the outermost node.
std::vector<double> l1_breaks(const RadialField &a, const RadialField &b) {
  const double h_min = std::min(min_spacing(a.grid()), min_spacing(b.grid()));
  const double h_max = std::max(max_spacing(a.grid()), max_spacing(b.grid()));
  const double outer = std::max(a.grid().back(), b.grid().back());
  const double cap = 16.0 * h_max;
  std::vector<double> br{0.0};
  double x = 8.0 * h_min;
  while (x < outer) {
    br.push_back(x);
    x += std::min(0.1 * x, cap);
  }
  br.push_back(outer);
  return br;
}

// int |F(r)| 4 pi r^2 dr over panels, splitting panels at sign changes of F.
template <class F>
double l1_radial(const std::vector<double> &breaks, F &&fn) {
  const auto &rule = numerics::gauss_legendre(8);
  auto panel = [&](double a, double b) {
    double s = 0.0;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double r = mid + half * rule.nodes[q];
      s += half * rule.weights[q] * std::abs(fn(r)) * r * r;
    }
    return s;
  };
  auto root = [&](double lo, double hi, double flo) {
    for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = fn(mid);
      if (fm == 0.0)
        return mid;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  double total = 0.0;
  std::vector<double> cuts;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    // sign probes at 9 equispaced points
    cuts.assign(1, a);
    double x0 = a, f0 = fn(a);
    for (int k = 1; k <= 8; ++k) {
      const double x1 = a + (b - a) * k / 8.0;
      const double f1 = fn(x1);
      if ((f0 < 0.0) != (f1 < 0.0) && f0 != 0.0 && f1 != 0.0)
        cuts.push_back(root(x0, x1, f0));
      x0 = x1;
      f0 = f1;
    }
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      total += panel(cuts[c], cuts[c + 1]);
  }
  return kFourPi * total;
}

double grad_sq_1(const StateDerivs &d, double r1, double t) {
  return d.d_r1 * d.d_r1 + (1.0 - t * t) * d.d_t * d.d_t / (r1 * r1);
}

double grad_sq_2(const StateDerivs &d, double r2, double t) {
  return d.d_r2 * d.d_r2 + (1.0 - t * t) * d.d_t * d.d_t / (r2 * r2);
}

} // namespace

const char *gauge_rule_name(GaugeRule rule) {
  switch (rule) {
  case GaugeRule::eigenstate_min:
    return "eigenstate-min";
  case GaugeRule::h_field_min:
    return "h-field-min";
  case GaugeRule::fixed:
    return "fixed";
  }
  return "?";
}

GaugeContext gauge_constant_eigen(std::span<const double> energies) {
  require(!energies.empty(), "gauge_constant_eigen: empty energy list");
  double lo = energies[0];
  for (double e : energies) {
    require(std::isfinite(e), "gauge_constant_eigen: non-finite energy");
    lo = std::min(lo, e);
  }
  GaugeContext g;
  g.c = std::max(0.0, -lo);
  g.member_energies.assign(energies.begin(), energies.end());
  g.rule = GaugeRule::eigenstate_min;
  return g;
}

GaugeContext gauge_fixed(double c, std::span<const double> energies) {
  require(std::isfinite(c) && c >= 0.0, "gauge_fixed: c must be finite and >= 0");
  GaugeContext g;
  g.c = c;
  g.member_energies.assign(energies.begin(), energies.end());
  g.rule = GaugeRule::fixed;
  for (double e : energies)
    check_gauge(e, g, "gauge_fixed");
  return g;
}

QuadratureMeta describe(const PairQuadrature &quad) {
  QuadratureMeta m;
  m.radial_panels = quad.breaks().size() - 1;
  m.panel_order = quad.options().panel_order;
  m.angular_points = quad.options().angular_points;
  m.inner = quad.breaks().size() > 1 ? quad.breaks()[1] : 0.0;
  m.outer = quad.breaks().back();
  return m;
}

PairQuadrature common_quadrature(std::span<const SystemRecord *const> systems) {
  std::vector<StateExtent> ext;
  for (const auto *s : systems) {
    require(s && s->state, "common_quadrature: system without state");
    ext.push_back(s->state->extent());
  }
  return PairQuadrature::covering(ext);
}

PairQuadrature common_quadrature(const SystemRecord &a, const SystemRecord &b) {
  const SystemRecord *both[] = {&a, &b};
  return common_quadrature(both);
}

double overlap(const CorrelatedState &a, const CorrelatedState &b, const PairQuadrature &quad) {
  double s = 0.0;
  std::vector<double> va, vb;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    va.resize(u.size());
    vb.resize(u.size());
    a.values(r1, r2, u, va);
    b.values(r1, r2, u, vb);
    for (std::size_t k = 0; k < u.size(); ++k)
      s += w[k] * va[k] * vb[k];
  });
  return s;
}

double d_psi(const CorrelatedState &a, const CorrelatedState &b, const PairQuadrature &quad) {
  double naa = 0.0, nbb = 0.0, ab = 0.0, minus = 0.0, plus = 0.0;
  std::vector<double> va, vb;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    va.resize(u.size());
    vb.resize(u.size());
    a.values(r1, r2, u, va);
    b.values(r1, r2, u, vb);
    for (std::size_t k = 0; k < u.size(); ++k) {
      naa += w[k] * va[k] * va[k];
      nbb += w[k] * vb[k] * vb[k];
      ab += w[k] * va[k] * vb[k];
      minus += w[k] * (va[k] - vb[k]) * (va[k] - vb[k]);
      plus += w[k] * (va[k] + vb[k]) * (va[k] + vb[k]);
    }
  });
  for (double n : {naa, nbb})
    if (std::abs(n - kParticles) > 1e-6) {
      std::ostringstream os;
      os << "d_psi: state norm " << n << " differs from N = 2";
      throw ContractViolation(os.str());
    }
  if (std::abs(ab) > kParticles + 1e-6) {
    std::ostringstream os;
    os << "d_psi: overlap magnitude " << std::abs(ab) << " exceeds N (quadrature error)";
    throw NumericalError(os.str());
  }
  return std::sqrt(std::min(minus, plus));
}

double d_rho(const RadialField &a, const RadialField &b) {
  if (same_samples(a, b))
    return 0.0;
  Sampler sa(a), sb(b);
  return l1_radial(l1_breaks(a, b), [&](double r) { return sa(r) - sb(r); });
}

double d_v1_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge,
                  const PairQuadrature &quad) {
  check_gauge(a.e_total, gauge, "d_v1_eigen");
  check_gauge(b.e_total, gauge, "d_v1_eigen");
  const double wa = a.e_total + gauge.c, wb = b.e_total + gauge.c;
  // a zero-weight member leaves the other's normalization
  if (wa == 0.0 || wb == 0.0)
    return kParticles * (wa + wb);
  double s = 0.0;
  std::vector<double> va, vb;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    va.resize(u.size());
    vb.resize(u.size());
    a.state->values(r1, r2, u, va);
    b.state->values(r1, r2, u, vb);
    for (std::size_t k = 0; k < u.size(); ++k)
      s += w[k] * std::abs(wa * va[k] * va[k] - wb * vb[k] * vb[k]);
  });
  return s;
}

double d_v1_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge) {
  return d_v1_eigen(a, b, gauge, common_quadrature(a, b));
}

double d_v2_eigen(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge) {
  check_gauge(a.e_total, gauge, "d_v2_eigen");
  check_gauge(b.e_total, gauge, "d_v2_eigen");
  require(a.density && b.density, "d_v2_eigen: missing density");
  if (same_samples(*a.density, *b.density))
    return kParticles * std::abs(a.e_total - b.e_total);
  const double wa = a.e_total + gauge.c, wb = b.e_total + gauge.c;
  if (wa == 0.0 || wb == 0.0)
    return kParticles * (wa + wb);
  Sampler sa(*a.density), sb(*b.density);
  return l1_radial(l1_breaks(*a.density, *b.density),
                   [&](double r) { return wa * sa(r) - wb * sb(r); });
}

namespace {

struct HComponents {
  std::vector<double> tau, pair, rho, v;
};

HComponents h_components(const SystemRecord &s, const PairQuadrature &quad) {
  require(s.state != nullptr, "h_field: system lacks a state");
  require(static_cast<bool>(s.potential), "h_field: system lacks a potential");
  const auto &nodes = quad.radial().nodes;
  HComponents out;
  out.tau.resize(nodes.size());
  out.pair.resize(nodes.size());
  out.rho.resize(nodes.size());
  out.v.resize(nodes.size());
  std::vector<StateDerivs> d;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double r = nodes[i];
    double tau = 0.0, pair = 0.0, rho = 0.0;
    quad.for_each_partner_shell(r, [&](double r2, std::span<const double> u,
                                       std::span<const double> w) {
      d.resize(u.size());
      s.state->derivatives(r, r2, u, d);
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double t = cos_angle(r, r2, u[k]);
        const double p2 = d[k].value * d[k].value;
        tau += w[k] * grad_sq_1(d[k], r, t);
        pair += w[k] * p2 / u[k];
        rho += w[k] * p2;
      }
    });
    out.tau[i] = 0.5 * tau;
    out.pair[i] = 0.5 * pair;
    out.rho[i] = rho;
    out.v[i] = s.potential(r);
  }
  return out;
}

} // namespace

HField h_field(const SystemRecord &s, const GaugeContext &gauge, const PairQuadrature &quad) {
  check_gauge(s.e_total, gauge, "h_field");
  const auto comp = h_components(s, quad);
  auto grid = std::make_shared<const RadialGrid>([&] {
    RadialGrid g;
    g.kind = numerics::GridKind::gauss_legendre_panel;
    g.nodes = quad.radial().nodes;
    g.weights = quad.radial().weights;
    return g;
  }());
  const std::size_t n = comp.tau.size();
  std::vector<double> h(n), tau(n), pair(n), pot(n), rho(n);
  const double lambda = s.interaction_scale;
  for (std::size_t i = 0; i < n; ++i) {
    tau[i] = comp.tau[i];
    pair[i] = lambda * comp.pair[i];
    rho[i] = comp.rho[i];
    pot[i] = (comp.v[i] + gauge.c / kParticles) * comp.rho[i];
    h[i] = kParticles * (tau[i] + pair[i] + pot[i]);
  }
  HField out;
  out.h = RadialField(grid, std::move(h));
  out.tau = RadialField(grid, std::move(tau));
  out.pair = RadialField(grid, std::move(pair));
  out.potential = RadialField(grid, std::move(pot));
  out.rho = RadialField(grid, std::move(rho));
  out.c = gauge.c;
  return out;
}

HField h_field(const SystemRecord &s, const GaugeContext &gauge) {
  return h_field(s, gauge, PairQuadrature::covering(std::array{s.state->extent()}));
}

double d_v2_general(const HField &a, const HField &b) {
  require(a.h.grid().nodes == b.h.grid().nodes, "d_v2_general: h fields on different grids");
  const auto &g = a.h.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    s += g.weights[i] * g.nodes[i] * g.nodes[i] * std::abs(a.h[i] - b.h[i]);
  return kFourPi * s;
}

double d_v2_general(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge) {
  const auto quad = common_quadrature(a, b);
  return d_v2_general(h_field(a, gauge, quad), h_field(b, gauge, quad));
}

GaugeContext gauge_constant_h(std::span<const SystemRecord *const> systems,
                              const PairQuadrature &quad) {
  require(!systems.empty(), "gauge_constant_h: empty system list");
  double need = 0.0;
  std::vector<double> energies;
  for (const auto *s : systems) {
    energies.push_back(s->e_total);
    const auto comp = h_components(*s, quad);
    for (std::size_t i = 0; i < comp.rho.size(); ++i) {
      if (!(comp.rho[i] > 1e-300))
        continue;
      const double rest = comp.tau[i] + s->interaction_scale * comp.pair[i] + comp.v[i] * comp.rho[i];
      need = std::max(need, -kParticles * rest / comp.rho[i]);
    }
  }
  if (!(need <= 1e9)) {
    std::ostringstream os;
    os << "gauge_constant_h: required c = " << need << " exceeds 1e9";
    throw NumericalError(os.str());
  }
  GaugeContext g;
  g.c = need > 0.0 ? std::ceil(need / 1e-3 - 1e-9) * 1e-3 : 0.0;
  g.member_energies = std::move(energies);
  g.rule = GaugeRule::h_field_min;
  return g;
}

double f_integral(const SystemRecord &s, const GaugeContext &gauge, const PairQuadrature &quad) {
  check_gauge(s.e_total, gauge, "f_integral");
  const double lambda = s.interaction_scale;
  double total = 0.0;
  std::vector<StateDerivs> d;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    d.resize(u.size());
    s.state->derivatives(r1, r2, u, d);
    const double v = s.potential(r1) + s.potential(r2) + gauge.c;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double t = cos_angle(r1, r2, u[k]);
      const double p2 = d[k].value * d[k].value;
      total += w[k] * (0.5 * (grad_sq_1(d[k], r1, t) + grad_sq_2(d[k], r2, t)) +
                       lambda * p2 / u[k] + v * p2);
    }
  });
  return total;
}

KineticForms kinetic_forms(const CorrelatedState &state, const PairQuadrature &quad) {
  KineticForms kf;
  std::vector<StateDerivs> d;
  quad.for_each_pair_shell([&](double r1, double r2, std::span<const double> u,
                               std::span<const double> w) {
    d.resize(u.size());
    state.derivatives(r1, r2, u, d);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double t = cos_angle(r1, r2, u[k]);
      kf.gradient += w[k] * 0.5 * (grad_sq_1(d[k], r1, t) + grad_sq_2(d[k], r2, t));
      kf.laplacian += w[k] * -0.5 * d[k].value * d[k].laplacian;
    }
  });
  return kf;
}

DistanceReport rescale(DistanceReport r, double e_a, double e_b, const GaugeContext &gauge) {
  r.rescaled_d_psi = 2.0 * r.d_psi / std::sqrt(2.0 * kParticles);
  r.rescaled_d_rho = 2.0 * r.d_rho / (2.0 * kParticles);
  const double denom = kParticles * ((e_a + gauge.c) + (e_b + gauge.c));
  auto pot = [&](double d) {
    if (d == 0.0)
      return 0.0;
    require(denom > 0.0, "rescale: zero or negative potential-distance denominator");
    return 2.0 * d / denom;
  };
  r.rescaled_d_v1 = pot(r.d_v1);
  r.rescaled_d_v2 = pot(r.d_v2);
  r.gauge = gauge;
  return r;
}

DistanceReport compare(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge,
                       const PairQuadrature &quad) {
  DistanceReport r;
  r.d_psi = d_psi(*a.state, *b.state, quad);
  r.d_rho = d_rho(*a.density, *b.density);
  r.d_v1 = d_v1_eigen(a, b, gauge, quad);
  r.d_v2 = d_v2_eigen(a, b, gauge);
  r.quadrature = describe(quad);
  return rescale(r, a.e_total, b.e_total, gauge);
}

DistanceReport compare(const SystemRecord &a, const SystemRecord &b, const GaugeContext &gauge) {
  return compare(a, b, gauge, common_quadrature(a, b));
}

double energy_ratio(const SystemRecord &s) {
  require(s.components.has_value(), "energy_ratio: energy components unavailable");
  require(s.components->external != 0.0, "energy_ratio: <V> = 0");
  return std::abs(s.components->interaction / s.components->external);
}

} // namespace metricdft::metrics
