// Command-line front end: solve, invert-ks, distance, scan, figure.

#include "metricdft/error.hpp"
#include "metricdft/harness/figures.hpp"
#include "metricdft/harness/io.hpp"
#include "metricdft/harness/scan.hpp"
#include "metricdft/metrics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace metricdft;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw IoError("cannot write " + path.string());
}

std::vector<double> parse_list(const std::string &list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty())
      continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    require(used == item.size(), "bad number '" + item + "' in parameter list");
    out.push_back(v);
  }
  return out;
}

void print_solution(const io::json &doc) {
  const auto &e = doc["energies"];
  std::printf("kind        %s\n", doc["kind"].get<std::string>().c_str());
  std::printf("e_total     %s\n", figures::format_number(e["e_total"].get<double>()).c_str());
  std::printf("ionization  %s\n", figures::format_number(e["ionization"].get<double>()).c_str());
  std::printf("<T> <U> <V> %s %s %s\n", figures::format_number(e["kinetic"].get<double>()).c_str(),
              figures::format_number(e["interaction"].get<double>()).c_str(),
              figures::format_number(e["external"].get<double>()).c_str());
  if (doc.contains("warnings"))
    for (const auto &w : doc["warnings"])
      std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
}

io::json report_json(const metrics::DistanceReport &r, const SystemRecord &a, const SystemRecord &b) {
  return io::json{{"a", a.label()},
                  {"b", b.label()},
                  {"gauge", {{"c", r.gauge.c}, {"rule", metrics::gauge_rule_name(r.gauge.rule)}}},
                  {"d_psi", r.d_psi},
                  {"d_rho", r.d_rho},
                  {"d_v1", r.d_v1},
                  {"d_v2", r.d_v2},
                  {"rescaled_d_psi", r.rescaled_d_psi},
                  {"rescaled_d_rho", r.rescaled_d_rho},
                  {"rescaled_d_v1", r.rescaled_d_v1},
                  {"rescaled_d_v2", r.rescaled_d_v2},
                  {"quadrature",
                   {{"radial_panels", r.quadrature.radial_panels},
                    {"panel_order", r.quadrature.panel_order},
                    {"angular_points", r.quadrature.angular_points},
                    {"outer", r.quadrature.outer}}}};
}

int run(int argc, char **argv) {
  CLI::App app{"Metric-space distances between two-electron systems"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1);

  // solve
  auto *solve = app.add_subcommand("solve", "Solve a many-body system and store it");
  solve->require_subcommand(1);
  double omega = 0.5, lambda = 1.0, z = 2.0;
  std::size_t grid_n = 16384;
  int omega_basis = 12;
  std::string out;
  auto *hooke_cmd = solve->add_subcommand("hooke", "Hooke's atom");
  hooke_cmd->add_option("--omega", omega, "confinement frequency")->required();
  hooke_cmd->add_option("--lambda", lambda, "interaction scale in [0, 1]");
  hooke_cmd->add_option("--grid-n", grid_n, "initial finite-difference intervals");
  hooke_cmd->add_option("--out", out, "output file")->required();
  auto *helium_cmd = solve->add_subcommand("helium", "Helium-like ion");
  helium_cmd->add_option("--z", z, "nuclear charge")->required();
  helium_cmd->add_option("--omega-basis", omega_basis, "basis size Omega (i+j+k <= Omega)");
  helium_cmd->add_option("--lambda", lambda, "interaction scale in [0, 1]");
  helium_cmd->add_option("--out", out, "output file")->required();

  // invert-ks
  std::string in;
  auto *invert = app.add_subcommand("invert-ks", "Invert the stored density to its Kohn-Sham system");
  invert->add_option("--in", in, "many-body solution file")->required();
  invert->add_option("--out", out, "output file")->required();

  // distance
  std::string file_a, file_b;
  double gauge_c = -1.0;
  auto *distance = app.add_subcommand("distance", "Distances between two stored systems");
  distance->add_option("--a", file_a, "first system file")->required();
  distance->add_option("--b", file_b, "second system file")->required();
  distance->add_option("--gauge-c", gauge_c, "fixed gauge constant (default: minimal)");

  // scan
  std::string family_name_arg, params_arg, out_dir;
  double reference = 0.0;
  bool full = false;
  unsigned threads = 1;
  auto *scan_cmd = app.add_subcommand("scan", "Family scan against a reference");
  scan_cmd->add_option("--family", family_name_arg, "hooke or helium")->required();
  scan_cmd->add_option("--params", params_arg, "comma-separated parameters (default: log-spaced window)");
  scan_cmd->add_option("--reference", reference, "reference parameter (default: 0.5 or 50)");
  scan_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  scan_cmd->add_flag("--full", full, "allow the wide parameter windows");
  scan_cmd->add_option("--threads", threads, "worker threads");
  scan_cmd->add_option("--omega-basis", omega_basis, "helium basis size");
  double scan_gauge_c = -1.0;
  scan_cmd->add_option("--gauge-c", scan_gauge_c, "fixed gauge constant (diagnostic; default: minimal)");

  // figure
  std::string which, prefix;
  std::vector<std::string> scan_dirs;
  auto *figure = app.add_subcommand("figure", "Emit CSV and SVG for a figure");
  figure->add_option("which", which, "fig1, fig2 or fig3")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  figure->add_option("--scan", scan_dirs, "scan directory (repeat for fig2)")->required();
  figure->add_option("--out", prefix, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*hooke_cmd) {
    hooke::HookeOptions opt;
    opt.grid_n = grid_n;
    const auto doc = io::to_json(hooke::assemble_solution({omega, lambda}, opt));
    io::store(doc, out);
    print_solution(doc);
  } else if (*helium_cmd) {
    const auto doc = io::to_json(helium::solve({z, omega_basis, lambda}));
    io::store(doc, out);
    print_solution(doc);
  } else if (*invert) {
    const auto source = io::load(in);
    const auto mb = io::record_from(source);
    require(!mb.kohn_sham, "invert-ks: input is already a Kohn-Sham system");
    const auto ks = ksinv::invert(mb);
    io::store(io::to_json(source, ks), out);
    std::printf("eps_ks      %s\n", figures::format_number(ks.eps_ks).c_str());
    std::printf("valid_r_max %s\n", figures::format_number(ks.valid_r_max).c_str());
    std::printf("round trip  eps %s overlap %s\n", figures::format_number(ks.round_trip.eigenvalue).c_str(),
                figures::format_number(ks.round_trip.overlap).c_str());
  } else if (*distance) {
    const auto a = io::record_from(io::load(file_a));
    const auto b = io::record_from(io::load(file_b));
    const double e[] = {a.e_total, b.e_total};
    const auto gauge = gauge_c >= 0.0 ? metrics::gauge_fixed(gauge_c, e) : metrics::gauge_constant_eigen(e);
    const auto report = metrics::compare(a, b, gauge);
    std::cout << report_json(report, a, b).dump(2) << '\n';
  } else if (*scan_cmd) {
    const auto family = parse_family(family_name_arg);
    if (reference == 0.0)
      reference = scan::default_reference(family);
    auto params = params_arg.empty() ? scan::default_params(family, full) : parse_list(params_arg);
    scan::ScanOptions opt;
    opt.threads = threads;
    opt.omega_basis = omega_basis;
    opt.full = full;
    if (scan_gauge_c >= 0.0)
      opt.gauge_c = scan_gauge_c;
    const auto result = scan::scan_family(family, params, reference, opt);
    for (const auto &w : result.warnings)
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
      throw IoError("cannot create " + out_dir + ": " + ec.message());
    io::store(figures::to_json(figures::tabulate(result)), fs::path(out_dir) / "scan.json");
    std::printf("%zu members, %zu failed, gauge c = %s\n", result.rows.size(), result.failures(),
                figures::format_number(result.gauge.c).c_str());
  } else if (*figure) {
    std::vector<figures::ScanTable> tables;
    for (const auto &d : scan_dirs)
      tables.push_back(figures::table_from_json(io::load(fs::path(d) / "scan.json")));
    figures::Figure f;
    if (which == "fig2") {
      f = figures::fig2(tables);
    } else {
      require(tables.size() == 1, which + " takes exactly one --scan");
      f = which == "fig1" ? figures::fig1(tables[0]) : figures::fig3(tables[0]);
    }
    write_text(prefix + ".csv", f.csv);
    write_text(prefix + ".svg", f.svg);
    for (const auto &flag : f.flags)
      std::fprintf(stderr, "flag: %s\n", flag.c_str());
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const ContractViolation &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const IoError &e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
