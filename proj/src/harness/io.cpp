#include "metricdft/harness/io.hpp"

#include <fstream>
#include <sstream>

#ifndef METRICDFT_VERSION
#define METRICDFT_VERSION "dev"
#endif

namespace metricdft::io {

namespace {

json header(const char *kind) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = kind;
  return doc;
}

json field_json(const numerics::RadialField &f) {
  const auto &g = f.grid();
  require(g.kind == numerics::GridKind::uniform, "io: only uniform grids are stored");
  return json{{"grid", {{"kind", "uniform"}, {"r_max", g.back()}, {"intervals", g.size() - 1}}},
              {"values", f.values()}};
}

const json &at(const json &doc, const std::string &ptr) {
  try {
    return doc.at(json::json_pointer(ptr));
  } catch (const json::exception &) {
    throw IoError("missing field " + ptr);
  }
}

double num(const json &doc, const std::string &ptr) {
  const auto &v = at(doc, ptr);
  if (!v.is_number())
    throw IoError("field " + ptr + " is not a number");
  return v.get<double>();
}

std::vector<double> numbers(const json &doc, const std::string &ptr) {
  const auto &v = at(doc, ptr);
  if (!v.is_array())
    throw IoError("field " + ptr + " is not an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw IoError("field " + ptr + "/" + std::to_string(i) + " is not a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

numerics::RadialField field_from(const json &doc, const std::string &ptr) {
  const double r_max = num(doc, ptr + "/grid/r_max");
  const double n = num(doc, ptr + "/grid/intervals");
  auto values = numbers(doc, ptr + "/values");
  if (n < 1 || n != std::floor(n) || values.size() != std::size_t(n) + 1)
    throw IoError("field " + ptr + ": grid and value count disagree");
  return numerics::RadialField(numerics::RadialGrid::uniform(r_max, std::size_t(n)),
                               std::move(values));
}

json components_json(const EnergyComponents &c) {
  return json{{"kinetic", c.kinetic}, {"interaction", c.interaction}, {"external", c.external}};
}

EnergyComponents components_from(const json &doc) {
  EnergyComponents c;
  c.kinetic = num(doc, "/energies/kinetic");
  c.interaction = num(doc, "/energies/interaction");
  c.external = num(doc, "/energies/external");
  return c;
}

std::string kind_of(const json &doc) {
  const auto &k = at(doc, "/kind");
  if (!k.is_string())
    throw IoError("field /kind is not a string");
  return k.get<std::string>();
}

} // namespace

const char *build_id() { return "metricdft " METRICDFT_VERSION; }

json to_json(const hooke::HookeSolution &s) {
  auto doc = header("hooke");
  doc["spec"] = {{"omega", s.spec.omega}, {"lambda", s.spec.lambda}};
  doc["energies"] = components_json(s.components);
  doc["energies"]["e_total"] = s.e_total;
  doc["energies"]["e_com"] = s.e_com;
  doc["energies"]["eps_rel"] = s.eps_rel;
  doc["energies"]["ionization"] = s.ionization;
  doc["relative_orbital"] = field_json(s.rel_orbital);
  doc["density"] = field_json(*s.density);
  doc["provenance"] = {{"build", build_id()},
                       {"relative_grid_intervals", s.rel_orbital.size() - 1},
                       {"richardson_tolerance", 1e-6},
                       {"density_intervals", s.density->size() - 1}};
  return doc;
}

json to_json(const helium::HeliumSolution &s) {
  auto doc = header("helium");
  doc["spec"] = {{"z", s.spec.z}, {"omega_basis", s.spec.omega_basis}, {"lambda", s.spec.lambda}};
  doc["energies"] = components_json(s.components);
  doc["energies"]["e_total"] = s.e_total;
  doc["energies"]["ionization"] = s.ionization;
  json basis = json::array();
  for (const auto &b : s.basis)
    basis.push_back({b.i, b.j, b.k});
  doc["coefficients"] = {{"basis", basis},
                         {"values", std::vector<double>(s.coeffs.data(), s.coeffs.data() + s.coeffs.size())}};
  doc["density"] = field_json(*s.density);
  doc["warnings"] = s.warnings;
  doc["provenance"] = {{"build", build_id()}, {"basis_size", s.basis.size()}};
  return doc;
}

json to_json(const json &source, const ksinv::KsSystem &ks) {
  auto doc = header("ks");
  doc["source"] = source;
  doc["ks"] = {{"eps_ks", ks.eps_ks},
               {"e_ks_total", ks.e_ks_total},
               {"valid_r_max", ks.valid_r_max},
               {"tail", ks.potential.tail == ksinv::TailModel::coulomb ? "coulomb" : "harmonic"},
               {"tail_a", ks.potential.tail_a},
               {"tail_b", ks.potential.tail_b},
               {"round_trip", {{"eigenvalue", ks.round_trip.eigenvalue}, {"overlap", ks.round_trip.overlap}}},
               {"orbital", field_json(ks.orbital)},
               {"v_ks", field_json(ks.potential.v_ks)}};
  doc["provenance"] = {{"build", build_id()}, {"density_floor", 1e-12}};
  return doc;
}

hooke::HookeSolution hooke_from(const json &doc) {
  if (kind_of(doc) != "hooke")
    throw IoError("document kind is not hooke");
  hooke::HookeSpec spec{num(doc, "/spec/omega"), num(doc, "/spec/lambda")};
  const auto density = field_from(doc, "/density");
  return hooke::from_relative(spec, num(doc, "/energies/eps_rel"), field_from(doc, "/relative_orbital"),
                              density.size() - 1);
}

helium::HeliumSolution helium_from(const json &doc) {
  if (kind_of(doc) != "helium")
    throw IoError("document kind is not helium");
  helium::HeliumSpec spec;
  spec.z = num(doc, "/spec/z");
  spec.omega_basis = int(num(doc, "/spec/omega_basis"));
  spec.lambda = num(doc, "/spec/lambda");
  const auto &basis_json = at(doc, "/coefficients/basis");
  const auto values = numbers(doc, "/coefficients/values");
  if (!basis_json.is_array() || basis_json.size() != values.size())
    throw IoError("field /coefficients: basis and values disagree");
  std::vector<helium::BasisIndex> basis;
  for (std::size_t n = 0; n < basis_json.size(); ++n) {
    const std::string p = "/coefficients/basis/" + std::to_string(n);
    basis.push_back({int(num(doc, p + "/0")), int(num(doc, p + "/1")), int(num(doc, p + "/2"))});
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(values.data(), Eigen::Index(values.size()));
  auto sol = helium::from_coefficients(spec, std::move(basis), std::move(c), num(doc, "/energies/e_total"),
                                       components_from(doc));
  if (doc.contains("warnings") && doc["warnings"].is_array())
    for (const auto &w : doc["warnings"])
      if (w.is_string())
        sol.warnings.push_back(w.get<std::string>());
  return sol;
}

SystemRecord record_from(const json &doc) {
  const auto kind = kind_of(doc);
  if (kind == "hooke")
    return hooke::to_record(hooke_from(doc));
  if (kind == "helium")
    return helium::to_record(helium_from(doc));
  if (kind == "ks") {
    const auto source = record_from(at(doc, "/source"));
    return ksinv::to_record(ksinv::invert(source), source);
  }
  throw IoError("unknown document kind '" + kind + "'");
}

void store(const json &doc, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(1) << '\n';
  if (!out)
    throw IoError("write failed: " + path.string());
}

json parse(const std::string &text, const std::string &origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw IoError(origin + ": parse error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object())
    throw IoError(origin + ": top level is not an object");
  try {
    const double v = num(doc, "/schema_version");
    if (v != kSchemaVersion) {
      std::ostringstream os;
      os << origin << ": schema_version " << v << " is not supported by this build (expects "
         << kSchemaVersion << "); migrate the file or use a matching build";
      throw SchemaError(os.str());
    }
  } catch (const SchemaError &) {
    throw;
  } catch (const IoError &e) {
    throw IoError(origin + ": " + e.what());
  }
  return doc;
}

json load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

} // namespace metricdft::io
