#include <catch_amalgamated.hpp>

#include "metricdft/error.hpp"
#include "metricdft/helium.hpp"
#include "metricdft/hooke.hpp"
#include "metricdft/ksinv.hpp"
#include "metricdft/metrics.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>

using namespace metricdft;
using namespace metricdft::ksinv;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

const SystemRecord &hooke_rec(double omega, double lambda = 1.0) {
  static std::map<std::pair<double, double>, SystemRecord> cache;
  auto key = std::make_pair(omega, lambda);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, hooke::to_record(hooke::assemble_solution({omega, lambda}))).first;
  return it->second;
}

const SystemRecord &helium_rec(double z, double lambda = 1.0) {
  static std::map<std::pair<double, double>, SystemRecord> cache;
  auto key = std::make_pair(z, lambda);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, helium::to_record(helium::solve({z, 12, lambda}))).first;
  return it->second;
}

numerics::RadialField hydrogenic_density(double z, double r_max, std::size_t n) {
  auto g = numerics::RadialGrid::uniform(r_max, n);
  std::vector<double> rho(g->size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    rho[i] = 2.0 * z * z * z / kPi * std::exp(-2.0 * z * g->nodes[i]);
  return numerics::RadialField(g, std::move(rho));
}

} // namespace

TEST_CASE("ks_orbital examples", "[ksinv]") {
  const double z = 2.0;
  const auto rho = hydrogenic_density(z, 20.0, 8000);
  const auto phi = ks_orbital(rho);
  for (std::size_t i = 0; i < phi.size(); i += 97) {
    const double r = phi.grid().nodes[i];
    CHECK_THAT(phi[i], WithinRel(std::sqrt(z * z * z / kPi) * std::exp(-z * r), 1e-14));
  }

  auto g = numerics::RadialGrid::uniform(4.0, 400);
  std::vector<double> v(g->size(), 0.0);
  for (std::size_t i = 0; i < 200; ++i)
    v[i] = 1.0;
  v[300] = -1e-13;
  const auto cut = ks_orbital(numerics::RadialField(g, v));
  for (std::size_t i = 200; i < cut.size(); ++i)
    CHECK(cut[i] == 0.0);
  v[300] = -1e-9;
  CHECK_THROWS_AS(ks_orbital(numerics::RadialField(g, v)), ContractViolation);

  const auto hp = ks_orbital(*hooke_rec(0.5).density);
  double n = 0.0;
  const auto &x = hp.grid().nodes;
  for (std::size_t i = 0; i < x.size(); ++i)
    n += hp.grid().weights[i] * 4.0 * kPi * x[i] * x[i] * hp[i] * hp[i];
  CHECK_THAT(n, WithinAbs(1.0, 1e-8));
}

TEST_CASE("ks_eigenvalue examples", "[ksinv]") {
  for (double z : {1.0, 2.0, 5.0})
    CHECK_THAT(ks_eigenvalue(helium_rec(z, 0.0)), WithinAbs(-0.5 * z * z, 1e-9));
  CHECK_THAT(ks_eigenvalue(hooke_rec(0.5)), WithinAbs(1.25, 1e-5));
  const auto &he = helium_rec(2);
  CHECK(ks_eigenvalue(he) == he.e_total + 2.0);
  CHECK_THAT(ks_eigenvalue(he), WithinAbs(-0.904, 0.005));
}

TEST_CASE("ks_potential recovers the external potential without interaction", "[ksinv]") {
  for (double z : {1.0, 2.0, 10.0}) {
    INFO("z = " << z);
    const auto ks = invert(helium_rec(z, 0.0));
    CHECK(ks.potential.tail == TailModel::coulomb);
    double worst = 0.0;
    for (double r = 0.1; r <= ks.valid_r_max; r += 0.01)
      worst = std::max(worst, std::abs(ks.potential(r) + z / r));
    CHECK(worst < 1e-5);
    CHECK(ks.valid_r_max > 5.0 / z);
  }
  for (double w : {0.1, 0.5, 3.0}) {
    INFO("omega = " << w);
    const auto ks = invert(hooke_rec(w, 0.0));
    CHECK(ks.potential.tail == TailModel::harmonic);
    CHECK_THAT(ks.eps_ks, WithinAbs(1.5 * w, 1e-8));
    double worst = 0.0;
    for (double r = 0.0; r <= ks.valid_r_max; r += 0.005)
      worst = std::max(worst, std::abs(ks.potential(r) - 0.5 * w * w * r * r));
    CHECK(worst < 1e-5);
  }

  // the analytic identity on a hydrogenic input
  const auto phi = ks_orbital(hydrogenic_density(2.0, 25.0, 10000));
  const auto v = ks_potential(phi, -2.0, TailModel::coulomb);
  for (double r = 0.1; r <= v.valid_r_max; r += 0.05)
    CHECK_THAT(v(r), WithinAbs(-2.0 / r, 1e-5));
  // beyond the floor the Coulomb tail continues
  const double r_out = v.valid_r_max * 1.5;
  CHECK_THAT(v(r_out) * r_out, WithinAbs(v(v.valid_r_max) * v.valid_r_max, 1e-9));

  auto g = numerics::RadialGrid::uniform(4.0, 400);
  CHECK_THROWS_AS(ks_potential(numerics::RadialField(g, std::vector<double>(401, 0.0)), -1.0,
                               TailModel::coulomb),
                  NumericalError);
}

TEST_CASE("round trip reproduces eigenvalue and orbital", "[ksinv]") {
  std::vector<const SystemRecord *> systems = {&hooke_rec(0.1), &hooke_rec(0.5), &hooke_rec(2.0),
                                               &helium_rec(1), &helium_rec(2), &helium_rec(50)};
  for (const auto *s : systems) {
    INFO(s->label());
    const auto ks = invert(*s);
    CHECK_THAT(ks.round_trip.eigenvalue, WithinAbs(ks.eps_ks, 1e-4));
    CHECK(ks.round_trip.overlap > 1.0 - 1e-6);
    CHECK(ks.round_trip.overlap <= 1.0 + 1e-9);
  }
}

TEST_CASE("ks_two_electron examples", "[ksinv]") {
  const auto &mb = hooke_rec(0.5);
  const auto ks = invert(mb);
  CHECK(ks.e_ks_total == 2.0 * ks.eps_ks);
  CHECK(ks.density == mb.density);

  const auto &rho = *ks.density;
  for (std::size_t i = 1; i < rho.size(); i += 131) {
    const double r = rho.grid().nodes[i];
    for (double t : {-1.0, 0.0, 0.7})
      CHECK_THAT(ks.state->value(r, r, t), WithinAbs(rho[i] / std::numbers::sqrt2, 1e-10));
    for (std::size_t j = 3; j < rho.size(); j += 257) {
      const double r2 = rho.grid().nodes[j];
      CHECK_THAT(ks.state->value(r, r2, 0.3),
                 WithinAbs(std::sqrt(rho[i] * rho[j] / 2.0), 1e-10));
    }
  }

  const auto quad = PairQuadrature::covering(std::array{ks.state->extent()});
  CHECK_THAT(metrics::overlap(*ks.state, *ks.state, quad), WithinAbs(2.0, 1e-8));
}

TEST_CASE("inversion of a product source is exact", "[ksinv][property]") {
  for (const SystemRecord *mb : {&hooke_rec(0.5, 0.0), &helium_rec(2, 0.0)}) {
    const auto ks = to_record(invert(*mb), *mb);
    CHECK(ks.kohn_sham);
    CHECK(ks.density == mb->density);
    CHECK(metrics::d_rho(*mb->density, *ks.density) == 0.0);
    const auto quad = metrics::common_quadrature(*mb, ks);
    CHECK(metrics::d_psi(*mb->state, *ks.state, quad) < 1e-6);
    CHECK_THAT(ks.e_total, WithinAbs(mb->e_total, 1e-8));
  }
}

TEST_CASE("D_v1 between external and KS potentials shrinks with confinement", "[ksinv][property]") {
  // A gauge well above every |E|: with the minimal one the deepest member's
  // weight E + c vanishes and its distance saturates at 2.
  auto dv1 = [](const SystemRecord &mb, std::optional<double> c) {
    const auto ks = to_record(invert(mb), mb);
    const double e[] = {mb.e_total, ks.e_total};
    const auto g = c ? metrics::gauge_fixed(*c, e) : metrics::gauge_constant_eigen(e);
    return metrics::compare(mb, ks, g).rescaled_d_v1;
  };
  double prev = 3.0;
  for (double w : {0.1, 0.5, 2.0, 10.0}) {
    const double d = dv1(hooke_rec(w), std::nullopt);
    CHECK(d > 0.0);
    CHECK(d < prev);
    prev = d;
  }
  prev = 3.0;
  for (double z : {1.0, 2.0, 10.0, 50.0}) {
    const double d = dv1(helium_rec(z), 4.0e6);
    CHECK(d > 0.0);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.01);
  CHECK(dv1(helium_rec(2.0), std::nullopt) == 2.0);
}
