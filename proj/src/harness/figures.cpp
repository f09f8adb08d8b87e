#include "metricdft/harness/figures.hpp"

#include "metricdft/error.hpp"
#include "metricdft/harness/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace metricdft::figures {

using nlohmann::json;

namespace {

json report_json(const metrics::DistanceReport &r) {
  return json{{"d_psi", r.d_psi},
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
                {"inner", r.quadrature.inner},
                {"outer", r.quadrature.outer}}}};
}

double get(const json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_number())
    throw IoError(std::string("scan table: missing number '") + key + "'");
  return j[key].get<double>();
}

metrics::DistanceReport report_from(const json &j, const metrics::GaugeContext &gauge) {
  metrics::DistanceReport r;
  r.d_psi = get(j, "d_psi");
  r.d_rho = get(j, "d_rho");
  r.d_v1 = get(j, "d_v1");
  r.d_v2 = get(j, "d_v2");
  r.rescaled_d_psi = get(j, "rescaled_d_psi");
  r.rescaled_d_rho = get(j, "rescaled_d_rho");
  r.rescaled_d_v1 = get(j, "rescaled_d_v1");
  r.rescaled_d_v2 = get(j, "rescaled_d_v2");
  if (j.contains("quadrature")) {
    const auto &q = j["quadrature"];
    r.quadrature.radial_panels = std::size_t(get(q, "radial_panels"));
    r.quadrature.panel_order = int(get(q, "panel_order"));
    r.quadrature.angular_points = int(get(q, "angular_points"));
    r.quadrature.inner = get(q, "inner");
    r.quadrature.outer = get(q, "outer");
  }
  r.gauge = gauge;
  return r;
}

std::string header(const ScanTable &t, const char *figure) {
  std::ostringstream os;
  os << "# figure=" << figure << '\n'
     << "# family=" << family_name(t.family) << '\n'
     << "# reference=" << format_number(t.reference) << '\n'
     << "# gauge_c=" << format_number(t.gauge.c) << '\n'
     << "# gauge_rule=" << metrics::gauge_rule_name(t.gauge.rule) << '\n'
     << "# spacing=" << t.spacing << '\n';
  if (t.family == Family::helium)
    os << "# omega_basis=" << t.omega_basis << '\n';
  for (const auto &r : t.rows)
    if (!r.failed) {
      const auto &q = r.mb_vs_ref.quadrature;
      os << "# quadrature=pair panels " << q.panel_order << "-point GL, " << q.angular_points
         << "-point angular, outer radius per pair\n";
      break;
    }
  os << "# build=" << io::build_id() << '\n';
  for (const auto &w : t.warnings)
    os << "# warning=" << w << '\n';
  return os.str();
}

void check_nonempty(const ScanTable &t, const char *who) {
  const bool any = std::any_of(t.rows.begin(), t.rows.end(), [](const TableRow &r) { return !r.failed; });
  require(any, std::string(who) + ": empty scan");
}

// --- minimal SVG -------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool markers = false;
};

struct Panel {
  std::string title, xlabel, ylabel;
  bool logx = false;
  double y_min = 0.0, y_max = 2.0;
  std::vector<Series> series;
};

const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

std::string render(const std::vector<Panel> &panels, int columns) {
  const double pw = 420, ph = 320, ml = 60, mr = 130, mt = 30, mb = 45;
  const int rows = int((panels.size() + columns - 1) / columns);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(pw * columns) << "\" height=\""
     << fmt(ph * rows) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto &pan = panels[p];
    const double ox = pw * double(p % columns), oy = ph * double(p / columns);
    const double x0 = ox + ml, x1 = ox + pw - mr, y0 = oy + ph - mb, y1 = oy + mt;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &s : pan.series)
      for (double v : s.x)
        if (std::isfinite(v) && (!pan.logx || v > 0)) {
          lo = std::min(lo, pan.logx ? std::log10(v) : v);
          hi = std::max(hi, pan.logx ? std::log10(v) : v);
        }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (pan.logx) {
      lo = std::floor(lo);
      hi = std::ceil(hi);
    }
    if (hi <= lo)
      hi = lo + 1.0;
    auto sx = [&](double v) { return x0 + (x1 - x0) * ((pan.logx ? std::log10(v) : v) - lo) / (hi - lo); };
    auto sy = [&](double v) { return y0 - (y0 - y1) * (v - pan.y_min) / (pan.y_max - pan.y_min); };

    os << "<g>\n<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(oy + 18)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(pan.title) << "</text>\n";
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y1) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
       << fmt(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double v = pan.y_min + (pan.y_max - pan.y_min) * k / 4.0;
      os << "<text x=\"" << fmt(x0 - 5) << "\" y=\"" << fmt(sy(v) + 4) << "\" text-anchor=\"end\">"
         << tick_label(v) << "</text>\n";
    }
    if (pan.logx) {
      for (int d = int(lo); d <= int(hi); ++d)
        os << "<text x=\"" << fmt(x0 + (x1 - x0) * (d - lo) / (hi - lo)) << "\" y=\"" << fmt(y0 + 15)
           << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
    } else {
      for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        os << "<text x=\"" << fmt(sx(v)) << "\" y=\"" << fmt(y0 + 15) << "\" text-anchor=\"middle\">"
           << tick_label(v) << "</text>\n";
      }
    }
    os << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(y0 + 32) << "\" text-anchor=\"middle\">"
       << xml_escape(pan.xlabel) << "</text>\n";
    os << "<text x=\"" << fmt(ox + 14) << "\" y=\"" << fmt((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
       << fmt(ox + 14) << ' ' << fmt((y0 + y1) / 2) << ")\">" << xml_escape(pan.ylabel) << "</text>\n";

    for (std::size_t s = 0; s < pan.series.size(); ++s) {
      const auto &ser = pan.series[s];
      const char *color = kColors[s % 8];
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < ser.x.size(); ++i) {
        if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i]) || (pan.logx && ser.x[i] <= 0))
          continue;
        os << (first ? "" : " ") << fmt(sx(ser.x[i])) << ',' << fmt(sy(ser.y[i]));
        first = false;
      }
      os << "\"/>\n";
      if (ser.markers)
        for (std::size_t i = 0; i < ser.x.size(); ++i)
          if (std::isfinite(ser.x[i]) && std::isfinite(ser.y[i]))
            os << "<circle cx=\"" << fmt(sx(ser.x[i])) << "\" cy=\"" << fmt(sy(ser.y[i])) << "\" r=\"2\" fill=\""
               << color << "\"/>\n";
      const double ly = y1 + 14.0 * double(s) + 8;
      os << "<line x1=\"" << fmt(x1 + 8) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(x1 + 24) << "\" y2=\""
         << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << fmt(x1 + 28) << "\" y=\"" << fmt(ly + 4) << "\">" << xml_escape(ser.name)
         << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::size_t> ranks(const std::vector<double> &v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

} // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScanTable tabulate(const scan::FamilyScan &scan) {
  ScanTable t;
  t.family = scan.family;
  t.reference = scan.reference;
  t.gauge = scan.gauge;
  t.spacing = scan.spacing;
  t.omega_basis = scan.omega_basis;
  t.warnings = scan.warnings;
  for (const auto &r : scan.rows) {
    TableRow row;
    row.param = r.param;
    row.failed = r.failed;
    row.error = r.error;
    if (!r.failed) {
      row.e_mb = r.mb.e_total;
      row.e_ks = r.ks.e_total;
      row.rt_eigenvalue = r.round_trip.eigenvalue;
      row.rt_overlap = r.round_trip.overlap;
      row.energy_ratio = r.energy_ratio;
      row.mb_vs_ref = r.mb_vs_ref;
      row.ks_vs_ref = r.ks_vs_ref;
      row.mb_vs_ks = r.mb_vs_ks;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json to_json(const ScanTable &t) {
  json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["kind"] = "scan";
  doc["family"] = family_name(t.family);
  doc["reference"] = t.reference;
  doc["gauge"] = {{"c", t.gauge.c},
                  {"rule", metrics::gauge_rule_name(t.gauge.rule)},
                  {"member_energies", t.gauge.member_energies}};
  doc["spacing"] = t.spacing;
  doc["omega_basis"] = t.omega_basis;
  doc["warnings"] = t.warnings;
  doc["build"] = io::build_id();
  json rows = json::array();
  for (const auto &r : t.rows) {
    json row{{"param", r.param}, {"failed", r.failed}};
    if (r.failed) {
      row["error"] = r.error;
    } else {
      row["e_mb"] = r.e_mb;
      row["e_ks"] = r.e_ks;
      row["round_trip"] = {{"eigenvalue", r.rt_eigenvalue}, {"overlap", r.rt_overlap}};
      row["energy_ratio"] = r.energy_ratio;
      row["mb_vs_ref"] = report_json(r.mb_vs_ref);
      row["ks_vs_ref"] = report_json(r.ks_vs_ref);
      row["mb_vs_ks"] = report_json(r.mb_vs_ks);
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

ScanTable table_from_json(const json &doc) {
  if (!doc.contains("kind") || doc["kind"] != "scan")
    throw IoError("not a scan document");
  ScanTable t;
  try {
    t.family = parse_family(doc.at("family").get<std::string>());
    t.reference = doc.at("reference").get<double>();
    t.gauge.c = doc.at("gauge").at("c").get<double>();
    const auto rule = doc.at("gauge").at("rule").get<std::string>();
    t.gauge.rule = rule == "fixed" ? metrics::GaugeRule::fixed
                   : rule == "h-field-min" ? metrics::GaugeRule::h_field_min
                                            : metrics::GaugeRule::eigenstate_min;
    t.gauge.member_energies = doc.at("gauge").at("member_energies").get<std::vector<double>>();
    t.spacing = doc.value("spacing", "log");
    t.omega_basis = doc.value("omega_basis", 12);
    t.warnings = doc.value("warnings", std::vector<std::string>{});
    for (const auto &j : doc.at("rows")) {
      TableRow r;
      r.param = j.at("param").get<double>();
      r.failed = j.at("failed").get<bool>();
      if (r.failed) {
        r.error = j.value("error", "");
      } else {
        r.e_mb = get(j, "e_mb");
        r.e_ks = get(j, "e_ks");
        r.rt_eigenvalue = get(j.at("round_trip"), "eigenvalue");
        r.rt_overlap = get(j.at("round_trip"), "overlap");
        r.energy_ratio = get(j, "energy_ratio");
        r.mb_vs_ref = report_from(j.at("mb_vs_ref"), t.gauge);
        r.ks_vs_ref = report_from(j.at("ks_vs_ref"), t.gauge);
        r.mb_vs_ks = report_from(j.at("mb_vs_ks"), t.gauge);
      }
      t.rows.push_back(std::move(r));
    }
  } catch (const json::exception &e) {
    throw IoError(std::string("scan table: ") + e.what());
  }
  return t;
}

Figure fig1(const ScanTable &t) {
  check_nonempty(t, "fig1");
  Figure f;
  std::ostringstream os;
  os << header(t, "fig1");
  os << "param,mb_d_psi,mb_d_rho,mb_d_v1,mb_d_v2,ks_d_psi,ks_d_rho,ks_d_v1,ks_d_v2\n";
  Panel mb{"many-body", t.family == Family::hooke ? "omega" : "Z", "rescaled distance", true, 0.0, 2.0, {}};
  Panel ks = mb;
  ks.title = "Kohn-Sham";
  const char *names[] = {"D_psi", "D_rho", "D_v1", "D_v2"};
  for (const char *n : names) {
    mb.series.push_back({n, {}, {}, true});
    ks.series.push_back({n, {}, {}, true});
  }
  for (const auto &r : t.rows) {
    if (r.failed) {
      os << "# failed param=" << format_number(r.param) << " error=" << r.error << '\n';
      continue;
    }
    const double m[] = {r.mb_vs_ref.rescaled_d_psi, r.mb_vs_ref.rescaled_d_rho, r.mb_vs_ref.rescaled_d_v1,
                        r.mb_vs_ref.rescaled_d_v2};
    const double k[] = {r.ks_vs_ref.rescaled_d_psi, r.ks_vs_ref.rescaled_d_rho, r.ks_vs_ref.rescaled_d_v1,
                        r.ks_vs_ref.rescaled_d_v2};
    os << format_number(r.param);
    for (double v : m)
      os << ',' << format_number(v);
    for (double v : k)
      os << ',' << format_number(v);
    os << '\n';
    for (int s = 0; s < 4; ++s) {
      mb.series[s].x.push_back(r.param);
      mb.series[s].y.push_back(m[s]);
      ks.series[s].x.push_back(r.param);
      ks.series[s].y.push_back(k[s]);
    }
  }
  f.csv = os.str();
  f.svg = render({mb, ks}, 2);
  return f;
}

std::vector<Curve> curves(const ScanTable &t) {
  std::vector<Curve> out;
  const std::string system = t.family == Family::hooke ? "hooke" : "helium";
  for (const char *panel : {"mb", "ks"})
    for (const char *side : {"increasing", "decreasing"}) {
      Curve c{system, panel, side, {}, {}, {}, {}, {}};
      const bool up = std::string(side) == "increasing";
      std::vector<const TableRow *> rows;
      for (const auto &r : t.rows)
        if (!r.failed && (up ? r.param >= t.reference : r.param <= t.reference))
          rows.push_back(&r);
      if (!up)
        std::reverse(rows.begin(), rows.end());
      for (const auto *r : rows) {
        const auto &d = std::string(panel) == "mb" ? r->mb_vs_ref : r->ks_vs_ref;
        c.param.push_back(r->param);
        c.d_psi.push_back(d.rescaled_d_psi);
        c.d_rho.push_back(d.rescaled_d_rho);
        c.d_v1.push_back(d.rescaled_d_v1);
        c.d_v2.push_back(d.rescaled_d_v2);
      }
      out.push_back(std::move(c));
    }
  return out;
}

Figure fig2(const std::vector<ScanTable> &tables) {
  require(!tables.empty(), "fig2: no scans");
  Figure f;
  std::ostringstream os;
  os << "# figure=fig2\n";
  for (const auto &t : tables) {
    check_nonempty(t, "fig2");
    os << "# " << family_name(t.family) << " reference=" << format_number(t.reference)
       << " gauge_c=" << format_number(t.gauge.c) << " gauge_rule=" << metrics::gauge_rule_name(t.gauge.rule)
       << '\n';
  }
  os << "# build=" << io::build_id() << '\n';
  os << "system,panel,side,param,d_psi,d_rho,d_v1,d_v2,monotone\n";

  Panel pa{"D_v1 vs D_psi", "rescaled D_psi", "rescaled D_v1", false, 0.0, 2.0, {}};
  Panel pb{"D_v1 vs D_rho", "rescaled D_rho", "rescaled D_v1", false, 0.0, 2.0, {}};
  Panel pc{"D_v2 vs D_psi", "rescaled D_psi", "rescaled D_v2", false, 0.0, 2.0, {}};
  Panel pd{"D_v2 vs D_rho", "rescaled D_rho", "rescaled D_v2", false, 0.0, 2.0, {}};
  for (const auto &t : tables)
    for (const auto &c : curves(t)) {
      const std::string name = c.system + " " + c.panel + (c.side == "increasing" ? " up" : " down");
      for (std::size_t i = 0; i < c.param.size(); ++i) {
        bool mono = true;
        if (i > 0)
          for (const auto *v : {&c.d_psi, &c.d_rho, &c.d_v1, &c.d_v2})
            if ((*v)[i] < (*v)[i - 1] - 1e-6)
              mono = false;
        if (!mono)
          f.flags.push_back(name + ": non-monotone at param " + format_number(c.param[i]));
        os << c.system << ',' << c.panel << ',' << c.side << ',' << format_number(c.param[i]) << ','
           << format_number(c.d_psi[i]) << ',' << format_number(c.d_rho[i]) << ',' << format_number(c.d_v1[i])
           << ',' << format_number(c.d_v2[i]) << ',' << (mono ? 1 : 0) << '\n';
      }
      pa.series.push_back({name, c.d_psi, c.d_v1, true});
      pb.series.push_back({name, c.d_rho, c.d_v1, true});
      pc.series.push_back({name, c.d_psi, c.d_v2, true});
      pd.series.push_back({name, c.d_rho, c.d_v2, true});
    }
  for (auto *p : {&pa, &pb, &pc, &pd}) {
    p->y_max = 2.0;
    for (auto &s : p->series)
      s.x.insert(s.x.begin(), 0.0), s.y.insert(s.y.begin(), 0.0);
  }
  f.csv = os.str();
  f.svg = render({pa, pb, pc, pd}, 2);
  return f;
}

Figure fig3(const ScanTable &t) {
  check_nonempty(t, "fig3");
  Figure f;
  std::ostringstream os;
  os << header(t, "fig3");
  os << "param,d_psi_mb_ks,d_v1_mb_ks,energy_ratio\n";
  Panel p{"many-body vs Kohn-Sham", t.family == Family::hooke ? "omega" : "Z", "value", true, 0.0, 2.0, {}};
  p.series = {{"D_psi(MB,KS)", {}, {}, true}, {"D_v1(ext,KS)", {}, {}, true}, {"<U>/<V>", {}, {}, true}};
  double top = 0.0;
  for (const auto &r : t.rows) {
    if (r.failed) {
      os << "# failed param=" << format_number(r.param) << " error=" << r.error << '\n';
      continue;
    }
    const double v[] = {r.mb_vs_ks.rescaled_d_psi, r.mb_vs_ks.rescaled_d_v1, r.energy_ratio};
    os << format_number(r.param) << ',' << format_number(v[0]) << ',' << format_number(v[1]) << ','
       << format_number(v[2]) << '\n';
    for (int s = 0; s < 3; ++s) {
      p.series[s].x.push_back(r.param);
      p.series[s].y.push_back(v[s]);
      top = std::max(top, v[s]);
    }
  }
  p.y_max = top > 1.0 ? 2.0 : 1.0;
  f.csv = os.str();
  f.svg = render({p}, 1);
  return f;
}

double spearman(const std::vector<double> &x, const std::vector<double> &y) {
  require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length series");
  const auto rx = ranks(x), ry = ranks(y);
  std::vector<double> px(x.size()), py(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[rx[i]] = double(i);
    py[ry[i]] = double(i);
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d2 += (px[i] - py[i]) * (px[i] - py[i]);
  const double n = double(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double small_distance_slope(const std::vector<double> &x, const std::vector<double> &y, double x_max) {
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < x_max) {
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
    }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

double crossing(const std::vector<double> &param, const std::vector<double> &y, double level) {
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i - 1] >= level && y[i] < level) {
      const double t = (y[i - 1] - level) / (y[i - 1] - y[i]);
      return std::exp(std::log(param[i - 1]) + t * (std::log(param[i]) - std::log(param[i - 1])));
    }
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace metricdft::figures
