#pragma once

#include "metricdft/ksinv.hpp"
#include "metricdft/metrics.hpp"
#include "metricdft/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace metricdft::scan {

struct ScanOptions {
  unsigned threads = 1;
  int omega_basis = 12; ///< helium basis size
  bool full = false;    ///< allow the wide parameter windows
  std::optional<double> gauge_c; ///< fixed gauge instead of the minimal one
};

struct ScanRow {
  double param = 0.0;
  bool failed = false;
  std::string error;
  SystemRecord mb, ks;
  ksinv::RoundTrip round_trip;
  metrics::DistanceReport mb_vs_ref; ///< many-body panel
  metrics::DistanceReport ks_vs_ref; ///< Kohn-Sham panel
  metrics::DistanceReport mb_vs_ks;
  double energy_ratio = 0.0; ///< |<U>/<V>| of the many-body system
};

struct FamilyScan {
  Family family = Family::hooke;
  std::vector<double> params; ///< ascending
  double reference = 0.0;
  metrics::GaugeContext gauge; ///< one constant for every row
  std::vector<ScanRow> rows;   ///< aligned with params
  std::vector<std::string> warnings;
  std::string spacing = "log";
  int omega_basis = 12;

  const ScanRow &reference_row() const;
  std::size_t failures() const;
};

/// Supported parameter window: desk scale unless `full`.
std::pair<double, double> window(Family family, bool full);

/// `per_side` log-spaced values from lo to ref and from ref to hi, ref included.
std::vector<double> log_params(double lo, double ref, double hi, int per_side);

/// Default fig1-fig3 parameters and reference of a family.
std::vector<double> default_params(Family family, bool full);
double default_reference(Family family);

/// Solves every member, inverts KS and computes the distances. Members that
/// fail are flagged; more than 20% failures raise NumericalError. The result
/// does not depend on the thread count.
FamilyScan scan_family(Family family, std::vector<double> params, double reference,
                       const ScanOptions &options = {});

/// Many-body solve of one family member.
SystemRecord solve_member(Family family, double param, int omega_basis);

} // namespace metricdft::scan
