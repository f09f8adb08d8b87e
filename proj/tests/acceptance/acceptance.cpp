// Acceptance run: one PASS/FAIL line per criterion, diagnostics indented below.
#include "metricdft/error.hpp"
#include "metricdft/harness/figures.hpp"
#include "metricdft/harness/io.hpp"
#include "metricdft/harness/scan.hpp"
#include "metricdft/helium.hpp"
#include "metricdft/hooke.hpp"
#include "metricdft/ksinv.hpp"
#include "metricdft/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

using namespace metricdft;

namespace {

int failures = 0;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void note(const char *fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

void verdict(int id, bool pass, const std::string &what) {
  std::printf("CRITERION %d %s: %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass)
    ++failures;
}

using Metric = double metrics::DistanceReport::*;
constexpr Metric kRescaled[] = {&metrics::DistanceReport::rescaled_d_psi,
                                &metrics::DistanceReport::rescaled_d_rho,
                                &metrics::DistanceReport::rescaled_d_v1,
                                &metrics::DistanceReport::rescaled_d_v2};
constexpr const char *kMetricName[] = {"d_psi", "d_rho", "d_v1", "d_v2"};

bool strictly_decreasing(const std::vector<double> &y) {
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] < y[i - 1]))
      return false;
  return true;
}

// -- 1 --------------------------------------------------------------------

void hooke_exact() {
  Clock clock;
  const auto sol = hooke::assemble_solution({0.5, 1.0});
  const auto path = std::filesystem::temp_directory_path() / "metricdft_acceptance_hooke.json";
  io::store(io::to_json(sol), path);
  const double t = clock.seconds();
  const auto back = io::record_from(io::load(path));
  const bool e_ok = std::abs(sol.e_total - 2.0) < 1e-5 && back.e_total == sol.e_total;
  const bool i_ok = std::abs(sol.ionization - 1.25) < 1e-5;
  note("e_total %.12f  ionization %.12f  solve+store %.2f s", sol.e_total, sol.ionization, t);
  verdict(1, e_ok && i_ok && t < 5.0, "Hooke omega=0.5 energy 2.0 and ionization 1.25 within 1e-5 in < 5 s");
}

// -- 2 --------------------------------------------------------------------

void helium_chain() {
  const double e0 = helium::solve({2.0, 10, 0.0}).e_total;
  const double e10 = helium::solve({2.0, 10, 1.0}).e_total;
  const double e12 = helium::solve({2.0, 12, 1.0}).e_total;
  Clock clock;
  const auto s14 = helium::solve({2.0, 14, 1.0});
  const double t14 = clock.seconds();
  const auto &c = s14.components;
  const double virial = std::abs(2.0 * c.kinetic + c.interaction + c.external) / std::abs(s14.e_total);
  note("lambda=0 %.12f  Omega=10 %.9f  Omega=12 %.9f  Omega=14 %.9f", e0, e10, e12, s14.e_total);
  note("|E12 - E14| %.3e  virial defect %.3e  Omega=14 solve %.1f s", std::abs(e12 - s14.e_total), virial, t14);
  const bool pass = std::abs(e0 + 4.0) < 1e-9 && e10 <= -2.847656 && std::abs(e12 - s14.e_total) < 1e-3 &&
                    virial < 1e-3 && t14 < 120.0;
  verdict(2, pass, "helium variational chain, plateau and virial");
}

// -- 3 --------------------------------------------------------------------

void ks_exactness(const scan::FamilyScan &hooke_scan, const scan::FamilyScan &he_scan) {
  bool pass = true;
  auto potential_error = [](const SystemRecord &mb, double r_min) {
    const auto ks = ksinv::invert(mb);
    double worst = 0.0;
    const auto &nodes = ks.density->grid().nodes;
    for (double r : nodes)
      if (r >= r_min && r <= ks.valid_r_max)
        worst = std::max(worst, std::abs(ks.potential(r) - mb.potential(r)));
    return std::pair{worst, ks.valid_r_max};
  };
  for (double w : {0.1, 0.5, 3.0}) {
    const auto [err, r_max] = potential_error(hooke::to_record(hooke::assemble_solution({w, 0.0})), 0.0);
    note("hooke omega=%g lambda=0: max |v_KS - v_ext| %.2e on [0, %.2f]", w, err, r_max);
    pass = pass && err < 1e-5;
  }
  for (double z : {1.0, 2.0, 10.0}) {
    // every node but r = 0, where -Z/r is singular
    const auto [err, r_max] = potential_error(helium::to_record(helium::solve({z, 12, 0.0})), 1e-300);
    note("helium Z=%g lambda=0: max |v_KS - v_ext| %.2e on (0, %.2f]", z, err, r_max);
    pass = pass && err < 1e-5;
  }
  for (const auto *s : {&hooke_scan, &he_scan}) {
    double worst_eps = 0.0, worst_overlap = 0.0;
    for (const auto &row : s->rows) {
      const double eps = row.ks.e_total / 2.0;
      worst_eps = std::max(worst_eps, std::abs(row.round_trip.eigenvalue - eps));
      worst_overlap = std::max(worst_overlap, 1.0 - row.round_trip.overlap);
    }
    note("%s scan (%zu members): worst round-trip |d eps| %.2e, worst 1 - overlap %.2e",
         family_name(s->family), s->rows.size(), worst_eps, worst_overlap);
    pass = pass && worst_eps < 1e-4 && worst_overlap < 1e-6;
  }
  verdict(3, pass, "KS inversion exact at lambda=0; round trip within 1e-4 / 1-1e-6 on both default scans");
}

// -- 4 --------------------------------------------------------------------

void conservation_norms() {
  bool pass = true;
  std::vector<SystemRecord> hooke_sys, he_sys;
  for (double w : {0.1, 0.5, 2.0})
    hooke_sys.push_back(hooke::to_record(hooke::assemble_solution({w, 1.0})));
  for (double z : {1.0, 2.0, 10.0})
    he_sys.push_back(helium::to_record(helium::solve({z, 12, 1.0})));
  for (auto *family : {&hooke_sys, &he_sys}) {
    std::vector<const SystemRecord *> ptrs;
    for (const auto &s : *family)
      ptrs.push_back(&s);
    const auto quad = metrics::common_quadrature(ptrs);
    std::vector<double> energies;
    for (const auto *s : ptrs)
      energies.push_back(s->e_total);
    // the h >= 0 gauge, and a tight one where E dominates (E + c) N
    const auto wide = metrics::gauge_constant_h(ptrs, quad);
    const auto tight = metrics::gauge_fixed(metrics::gauge_constant_eigen(energies).c + 1.0, energies);
    for (const auto *s : ptrs) {
      for (const auto *gauge : {&wide, &tight}) {
        const double expect = (s->e_total + gauge->c) * 2.0;
        const double h = metrics::h_field(*s, *gauge, quad).integral();
        const double h_rel = std::abs(h - expect) / std::abs(expect);
        note("%-22s c=%-10.6g int h %.9g vs (E+c)N %.9g (rel %.1e)", s->label().c_str(), gauge->c, h, expect, h_rel);
        pass = pass && h_rel < 5e-3;
      }
      const auto k = metrics::kinetic_forms(*s->state, quad);
      const double k_rel = std::abs(k.gradient - k.laplacian) / std::abs(k.gradient);
      note("%-22s kinetic gradient %.12g laplacian %.12g (rel %.1e)", s->label().c_str(), k.gradient, k.laplacian,
           k_rel);
      pass = pass && k_rel < 1e-6;
    }
  }
  verdict(4, pass, "int h = (E+c)N within 0.5% and kinetic identity within 1e-6 on 6 systems");
}

// -- 5 --------------------------------------------------------------------

void metric_axioms() {
  std::vector<SystemRecord> sys;
  for (double w : {0.25, 0.5, 1.0, 2.0})
    sys.push_back(hooke::to_record(hooke::assemble_solution({w, 1.0})));
  sys.push_back(hooke::to_record(hooke::assemble_solution({0.5, 0.0})));
  for (double z : {1.0, 2.0, 5.0})
    sys.push_back(helium::to_record(helium::solve({z, 12, 1.0})));
  // deepest member, non-interacting
  sys.push_back(helium::to_record(helium::solve({5.0, 12, 0.0})));
  const auto ks_hooke = ksinv::to_record(ksinv::invert(sys[1]), sys[1]);
  const auto ks_he = ksinv::to_record(ksinv::invert(sys[6]), sys[6]);
  sys.push_back(ks_hooke);
  sys.push_back(ks_he);
  const std::size_t n = sys.size();

  std::vector<const SystemRecord *> ptrs;
  std::vector<double> energies;
  for (const auto &s : sys) {
    ptrs.push_back(&s);
    energies.push_back(s.e_total);
  }
  const auto quad = metrics::common_quadrature(ptrs);
  const auto gauge = metrics::gauge_constant_eigen(energies);
  note("%zu systems, gauge c=%.9g", n, gauge.c);

  std::vector<std::vector<double>> m[4];
  for (auto &x : m)
    x.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[0][i][j] = metrics::d_psi(*sys[i].state, *sys[j].state, quad);
      m[1][i][j] = metrics::d_rho(*sys[i].density, *sys[j].density);
      m[2][i][j] = metrics::d_v1_eigen(sys[i], sys[j], gauge, quad);
      m[3][i][j] = metrics::d_v2_eigen(sys[i], sys[j], gauge);
    }

  bool pass = true;
  for (int k = 0; k < 4; ++k) {
    double worst_diag = 0.0, worst_tri = -1e300;
    bool nonneg = true, symmetric = true;
    for (std::size_t i = 0; i < n; ++i) {
      worst_diag = std::max(worst_diag, m[k][i][i]);
      for (std::size_t j = 0; j < n; ++j) {
        nonneg = nonneg && m[k][i][j] >= 0.0;
        symmetric = symmetric && m[k][i][j] == m[k][j][i];
        for (std::size_t l = 0; l < n; ++l)
          worst_tri = std::max(worst_tri, m[k][i][l] - m[k][i][j] - m[k][j][l]);
      }
    }
    // distinct systems with equal densities are legitimately at D_rho = 0
    bool separated = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !(k == 1 && sys[i].density == sys[j].density))
          separated = separated && m[k][i][j] > 1e-8;
    note("%-6s nonneg %d  symmetric %d  max D(a,a) %.1e  distinct > 1e-8 %d  worst triangle excess %.1e",
         kMetricName[k], nonneg, symmetric, worst_diag, separated, worst_tri);
    pass = pass && nonneg && symmetric && worst_diag < 1e-8 && separated && worst_tri <= 1e-8;
  }

  bool bounded = true, strict = true;
  int strict_pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bounded = bounded && m[3][i][j] <= m[2][i][j] + 1e-9;
      const bool weighted = sys[i].e_total + gauge.c > 0.0 && sys[j].e_total + gauge.c > 0.0;
      if (weighted && sys[i].interaction_scale > 0.0 && sys[j].interaction_scale > 0.0) {
        ++strict_pairs;
        strict = strict && m[3][i][j] < m[2][i][j];
      }
    }
  note("D_v2 <= D_v1 on all %zu pairs: %d; strict on %d distinct interacting pairs: %d", n * (n - 1) / 2, bounded,
       strict_pairs, strict);
  verdict(5, pass && bounded && strict, "metric axioms for D_psi, D_rho, D_v1, D_v2 on 11 systems; D_v2 <= D_v1");
}

// -- 6 --------------------------------------------------------------------

bool fig1_ordering(const scan::FamilyScan &s) {
  const auto ref = std::find(s.params.begin(), s.params.end(), s.reference) - s.params.begin();
  bool monotone = true;
  for (auto panel : {&scan::ScanRow::mb_vs_ref, &scan::ScanRow::ks_vs_ref})
    for (int k = 0; k < 4; ++k) {
      auto v = [&](std::ptrdiff_t i) { return s.rows[i].*panel.*kRescaled[k]; };
      for (std::ptrdiff_t i = 0; i < ref; ++i)
        if (!(v(i) > v(i + 1))) {
          monotone = false;
          note("not increasing away from reference: %s %s at %g", panel == &scan::ScanRow::mb_vs_ref ? "mb" : "ks",
               kMetricName[k], s.params[i]);
        }
      for (std::ptrdiff_t i = ref + 1; i < std::ptrdiff_t(s.rows.size()); ++i)
        if (!(v(i) > v(i - 1))) {
          monotone = false;
          note("not increasing away from reference: %s %s at %g", panel == &scan::ScanRow::mb_vs_ref ? "mb" : "ks",
               kMetricName[k], s.params[i]);
        }
    }
  bool ordered = true;
  for (const auto *row : {&s.rows.front(), &s.rows.back()})
    for (const auto *d : {&row->mb_vs_ref, &row->ks_vs_ref}) {
      note("%s %-3s %-8g  D_v1 %.6f  D_psi %.6f  D_rho %.6f", family_name(s.family), d == &row->mb_vs_ref ? "mb" : "ks",
           row->param, d->rescaled_d_v1, d->rescaled_d_psi, d->rescaled_d_rho);
      ordered = ordered && d->rescaled_d_v1 >= d->rescaled_d_psi && d->rescaled_d_psi >= d->rescaled_d_rho;
    }
  note("%s: monotone %d, extreme ordering %d", family_name(s.family), monotone, ordered);
  return monotone && ordered;
}

// -- 7 --------------------------------------------------------------------

struct Fig3Series {
  std::vector<double> param, d_psi, d_v1, ratio;
};

Fig3Series fig3_series(const scan::FamilyScan &s) {
  Fig3Series out;
  for (const auto &row : s.rows) {
    out.param.push_back(row.param);
    out.d_psi.push_back(row.mb_vs_ks.rescaled_d_psi);
    out.d_v1.push_back(row.mb_vs_ks.rescaled_d_v1);
    out.ratio.push_back(row.energy_ratio);
  }
  return out;
}

// Falls toward zero: strictly decreasing, ending below a fifth of its start.
bool tends_to_zero(const std::vector<double> &y) { return strictly_decreasing(y) && y.back() < 0.2 * y.front(); }

bool large_end_claims(const char *family, const Fig3Series &f) {
  const bool psi = tends_to_zero(f.d_psi), v1 = tends_to_zero(f.d_v1), ratio = strictly_decreasing(f.ratio);
  const double rho_psi = figures::spearman(f.ratio, f.d_psi), rho_v1 = figures::spearman(f.ratio, f.d_v1);
  note("%s: D_psi(MB,KS) %.4g -> %.4g (to 0: %d)  D_v1 %.4g -> %.4g (to 0: %d)", family, f.d_psi.front(),
       f.d_psi.back(), psi, f.d_v1.front(), f.d_v1.back(), v1);
  note("%s: <U>/<V> %.4g -> %.4g monotone %d, Spearman vs D_psi %.4f, vs D_v1 %.4f", family, f.ratio.front(),
       f.ratio.back(), ratio, rho_psi, rho_v1);
  if (!v1) {
    std::size_t i_min = 0;
    for (std::size_t i = 1; i < f.d_v1.size(); ++i)
      if (f.d_v1[i] < f.d_v1[i_min])
        i_min = i;
    note("%s: D_v1 minimum %.4g at %g, then rises to %.4g at %g", family, f.d_v1[i_min], f.param[i_min],
         f.d_v1.back(), f.param.back());
  }
  return psi && v1 && ratio && rho_psi == 1.0 && rho_v1 == 1.0;
}

void fig3_claims(const scan::FamilyScan &hooke_scan, const scan::FamilyScan &he_scan, double elapsed) {
  const auto he = fig3_series(he_scan);
  const auto hk = fig3_series(hooke_scan);

  const double he_z1 = he.d_psi.front();
  const double he_cross = figures::crossing(he.param, he.d_psi, 0.2);
  const double hk_cross = figures::crossing(hk.param, hk.d_psi, 0.2);
  const bool he_z1_ok = he.param.front() == 1.0 && std::abs(he_z1 - 0.35) <= 0.05;
  const bool he_cross_ok = he_cross >= 1.2 && he_cross <= 2.0;
  const bool hk_cross_ok = hk_cross >= 0.9 && hk_cross <= 1.7;
  note("helium: D_psi(MB,KS) at Z=1 %.4f (0.35 +- 0.05: %d); crosses 0.2 at Z=%.4f ([1.2, 2.0]: %d)", he_z1,
       he_z1_ok, he_cross, he_cross_ok);
  note("hooke: D_psi(MB,KS) at omega=0.5 %.4f; crosses 0.2 at omega=%.4f ([0.9, 1.7]: %d)",
       hk.d_psi[std::find(hk.param.begin(), hk.param.end(), 0.5) - hk.param.begin()], hk_cross, hk_cross_ok);
  const bool he_end = large_end_claims("helium", he);
  const bool hk_end = large_end_claims("hooke", hk);

  // the helium D_v1 end with a gauge far above every |E|
  std::vector<double> energies;
  for (const auto &row : he_scan.rows) {
    energies.push_back(row.mb.e_total);
    energies.push_back(row.ks.e_total);
  }
  const auto wide = metrics::gauge_fixed(4.0e6, energies);
  std::vector<double> wide_v1;
  for (const auto &row : he_scan.rows)
    wide_v1.push_back(metrics::compare(row.mb, row.ks, wide).rescaled_d_v1);
  note("diagnostic, helium D_v1(MB,KS) with fixed c=4e6: %.4g -> %.4g, decreasing %d", wide_v1.front(),
       wide_v1.back(), strictly_decreasing(wide_v1));

  note("acceptance runtime so far %.0f s (limit 900 s)", elapsed);
  verdict(7, he_z1_ok && he_cross_ok && hk_cross_ok && he_end && hk_end && elapsed < 900.0,
          "fig3 quantitative claims");
}

// -- 8 --------------------------------------------------------------------

struct Outputs {
  std::string fig1_csv, fig1_svg, fig2_csv, fig2_svg, fig3_csv, fig3_svg;
  bool operator==(const Outputs &) const = default;
};

Outputs render(const scan::FamilyScan &s) {
  const auto t = figures::tabulate(s);
  const auto f1 = figures::fig1(t), f2 = figures::fig2({t}), f3 = figures::fig3(t);
  return {f1.csv, f1.svg, f2.csv, f2.svg, f3.csv, f3.svg};
}

void determinism(const scan::FamilyScan &hooke_scan) {
  const auto first = render(hooke_scan);
  const auto again = render(scan::scan_family(Family::hooke, scan::default_params(Family::hooke, false), 0.5));
  scan::ScanOptions par;
  par.threads = 2;
  const auto parallel = render(scan::scan_family(Family::hooke, scan::default_params(Family::hooke, false), 0.5, par));
  const auto json_a = figures::to_json(figures::tabulate(hooke_scan)).dump();
  const auto json_b = figures::to_json(figures::tabulate(
                                           scan::scan_family(Family::hooke, {0.1, 0.2, 1.0, 4.0}, 0.5, par)))
                          .dump();
  const auto json_c = figures::to_json(figures::tabulate(scan::scan_family(Family::hooke, {0.1, 0.2, 1.0, 4.0}, 0.5)))
                          .dump();
  note("repeat identical %d, 2 threads identical %d, small scan JSON identical %d (%zu bytes CSV)",
       first == again, first == parallel, json_b == json_c, first.fig1_csv.size());
  verdict(8, first == again && first == parallel && json_b == json_c && !json_a.empty(),
          "repeated and parallel scans byte-identical");
}

} // namespace

int main() {
  Clock total;
  try {
    hooke_exact();
    helium_chain();

    Clock scan_clock;
    const auto hooke_scan =
        scan::scan_family(Family::hooke, scan::default_params(Family::hooke, false), scan::default_reference(Family::hooke));
    note("hooke default scan: %zu members, %zu failed, %.1f s", hooke_scan.rows.size(), hooke_scan.failures(),
         scan_clock.seconds());
    scan_clock = Clock{};
    const auto he_scan = scan::scan_family(Family::helium, scan::default_params(Family::helium, false),
                                           scan::default_reference(Family::helium));
    note("helium default scan: %zu members, %zu failed, c=%.9g, %.1f s", he_scan.rows.size(), he_scan.failures(),
         he_scan.gauge.c, scan_clock.seconds());

    ks_exactness(hooke_scan, he_scan);
    conservation_norms();
    metric_axioms();
    const bool hooke_ok = fig1_ordering(hooke_scan);
    const bool he_ok = fig1_ordering(he_scan);
    verdict(6, hooke_ok && he_ok, "fig1 ordering on the default Hooke and helium scans");
    fig3_claims(hooke_scan, he_scan, total.seconds());
    determinism(hooke_scan);
  } catch (const std::exception &e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance finished in %.0f s, %d failing\n", total.seconds(), failures);
  return failures == 0 ? 0 : 1;
}
