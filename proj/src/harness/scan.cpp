#include "metricdft/harness/scan.hpp"

#include "metricdft/error.hpp"
#include "metricdft/helium.hpp"
#include "metricdft/hooke.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace metricdft::scan {

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn) {
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
        fn(i);
    });
  for (auto &th : pool)
    th.join();
}

void fail(ScanRow &row, const std::exception &e) {
  row.failed = true;
  row.error = e.what();
}

} // namespace

const ScanRow &FamilyScan::reference_row() const {
  for (const auto &r : rows)
    if (r.param == reference)
      return r;
  throw ContractViolation("scan has no reference row");
}

std::size_t FamilyScan::failures() const {
  return std::size_t(std::count_if(rows.begin(), rows.end(), [](const ScanRow &r) { return r.failed; }));
}

std::pair<double, double> window(Family family, bool full) {
  if (family == Family::hooke)
    return full ? std::pair{1e-4, 1000.0} : std::pair{0.05, 10.0};
  return full ? std::pair{1.0, 2000.0} : std::pair{1.0, 200.0};
}

std::vector<double> log_params(double lo, double ref, double hi, int per_side) {
  require(lo > 0.0 && lo <= ref && ref <= hi && per_side >= 1, "log_params: need 0 < lo <= ref <= hi");
  std::vector<double> out;
  const double a = std::log(lo), b = std::log(ref), c = std::log(hi);
  if (lo < ref)
    for (int i = 0; i < per_side; ++i)
      out.push_back(i == 0 ? lo : std::exp(a + (b - a) * i / per_side));
  out.push_back(ref);
  if (ref < hi)
    for (int i = 1; i <= per_side; ++i)
      out.push_back(i == per_side ? hi : std::exp(b + (c - b) * i / per_side));
  return out;
}

double default_reference(Family family) { return family == Family::hooke ? 0.5 : 50.0; }

std::vector<double> default_params(Family family, bool full) {
  const auto [lo, hi] = window(family, full);
  return log_params(lo, default_reference(family), hi, 12);
}

SystemRecord solve_member(Family family, double param, int omega_basis) {
  if (family == Family::hooke)
    return hooke::to_record(hooke::assemble_solution({param, 1.0}));
  return helium::to_record(helium::solve({param, omega_basis, 1.0}));
}

FamilyScan scan_family(Family family, std::vector<double> params, double reference,
                       const ScanOptions &options) {
  require(!params.empty(), "scan_family: empty parameter list");
  FamilyScan scan;
  scan.family = family;
  scan.omega_basis = options.omega_basis;

  const auto [lo, hi] = window(family, options.full);
  auto clip = [&, lo = lo, hi = hi](double p) {
    require(std::isfinite(p) && p > 0.0, "scan_family: parameters must be positive and finite");
    const double q = std::clamp(p, lo, hi);
    if (q != p) {
      std::ostringstream os;
      os << "parameter " << p << " outside [" << lo << ", " << hi << "], clipped to " << q;
      scan.warnings.push_back(os.str());
    }
    return q;
  };
  for (auto &p : params)
    p = clip(p);
  reference = clip(reference);
  params.push_back(reference);
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  scan.params = params;
  scan.reference = reference;
  scan.rows.resize(params.size());

  parallel_for(params.size(), options.threads, [&](std::size_t i) {
    auto &row = scan.rows[i];
    row.param = params[i];
    try {
      row.mb = solve_member(family, row.param, options.omega_basis);
      const auto ks = ksinv::invert(row.mb);
      row.round_trip = ks.round_trip;
      row.ks = ksinv::to_record(ks, row.mb);
      row.energy_ratio = metrics::energy_ratio(row.mb);
    } catch (const std::exception &e) {
      fail(row, e);
    }
  });

  const auto ref_index = std::size_t(std::find(params.begin(), params.end(), reference) - params.begin());
  if (scan.rows[ref_index].failed)
    throw NumericalError("scan_family: reference member failed: " + scan.rows[ref_index].error);
  if (5 * scan.failures() > scan.rows.size()) {
    std::ostringstream os;
    os << "scan_family: " << scan.failures() << " of " << scan.rows.size() << " members failed";
    throw NumericalError(os.str());
  }

  std::vector<double> energies;
  for (const auto &row : scan.rows)
    if (!row.failed) {
      energies.push_back(row.mb.e_total);
      energies.push_back(row.ks.e_total);
    }
  scan.gauge = options.gauge_c ? metrics::gauge_fixed(*options.gauge_c, energies)
                               : metrics::gauge_constant_eigen(energies);

  const auto &ref = scan.rows[ref_index];
  parallel_for(params.size(), options.threads, [&](std::size_t i) {
    auto &row = scan.rows[i];
    if (row.failed)
      return;
    try {
      row.mb_vs_ref = metrics::compare(row.mb, ref.mb, scan.gauge);
      row.ks_vs_ref = metrics::compare(row.ks, ref.ks, scan.gauge);
      row.mb_vs_ks = metrics::compare(row.mb, row.ks, scan.gauge);
    } catch (const std::exception &e) {
      fail(row, e);
    }
  });
  if (5 * scan.failures() > scan.rows.size())
    throw NumericalError("scan_family: more than 20% of members failed");
  return scan;
}

} // namespace metricdft::scan
