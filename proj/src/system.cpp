#include "metricdft/system.hpp"

#include "metricdft/error.hpp"

#include <sstream>

namespace metricdft {

const char *family_name(Family f) {
  return f == Family::hooke ? "hooke" : "helium";
}

Family parse_family(const std::string &name) {
  if (name == "hooke")
    return Family::hooke;
  if (name == "helium")
    return Family::helium;
  throw ContractViolation("unknown family '" + name + "'");
}

std::string SystemRecord::label() const {
  std::ostringstream os;
  os << family_name(family) << (family == Family::hooke ? " omega=" : " Z=") << param;
  if (kohn_sham)
    os << " (KS)";
  else if (interaction_scale != 1.0)
    os << " lambda=" << interaction_scale;
  return os.str();
}

} // namespace metricdft
