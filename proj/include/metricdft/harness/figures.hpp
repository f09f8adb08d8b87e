#pragma once

#include "metricdft/harness/scan.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace metricdft::figures {

/// Scan results without states; what scan writes and figure reads.
struct TableRow {
  double param = 0.0;
  bool failed = false;
  std::string error;
  double e_mb = 0.0, e_ks = 0.0;
  double rt_eigenvalue = 0.0, rt_overlap = 0.0;
  double energy_ratio = 0.0;
  metrics::DistanceReport mb_vs_ref, ks_vs_ref, mb_vs_ks;
};

struct ScanTable {
  Family family = Family::hooke;
  double reference = 0.0;
  metrics::GaugeContext gauge;
  std::string spacing = "log";
  int omega_basis = 12;
  std::vector<std::string> warnings;
  std::vector<TableRow> rows;
};

ScanTable tabulate(const scan::FamilyScan &scan);
nlohmann::json to_json(const ScanTable &table);
ScanTable table_from_json(const nlohmann::json &doc);

/// Text of one emitted figure.
struct Figure {
  std::string csv;
  std::string svg;
  std::vector<std::string> flags; ///< non-fatal findings (fig2 monotonicity)
};

/// param plus the four rescaled distances for the MB and KS panels.
Figure fig1(const ScanTable &table);
/// Rescaled D_v1, D_v2 against D_psi, D_rho for every family curve.
Figure fig2(const std::vector<ScanTable> &tables);
/// MB-vs-KS rescaled D_psi, D_v1 and <U>/<V>.
Figure fig3(const ScanTable &table);

/// One branch of a scan away from the reference, ordered outward.
struct Curve {
  std::string system, panel, side;
  std::vector<double> param, d_psi, d_rho, d_v1, d_v2;
};
std::vector<Curve> curves(const ScanTable &table);

double spearman(const std::vector<double> &x, const std::vector<double> &y);
/// Least-squares slope through the origin over points with x < x_max.
double small_distance_slope(const std::vector<double> &x, const std::vector<double> &y, double x_max);
/// Parameter where y first falls through `level`, log-interpolated in the
/// parameter; NaN when it never does.
double crossing(const std::vector<double> &param, const std::vector<double> &y, double level);

/// %.17g
std::string format_number(double v);

} // namespace metricdft::figures
