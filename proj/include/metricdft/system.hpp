#pragma once

#include "metricdft/numerics/grid.hpp"
#include "metricdft/state.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace metricdft {

enum class Family { hooke, helium };

/// Expectation values of kinetic, electron-electron and external energy.
struct EnergyComponents {
  double kinetic = 0.0;
  double interaction = 0.0;
  double external = 0.0;
  double total() const { return kinetic + interaction + external; }
};

using DensityPtr = std::shared_ptr<const numerics::RadialField>;

/// One solved two-electron system, many-body or Kohn-Sham. Everything the
/// metrics need: energy, density, state and the one-body potential v(r).
struct SystemRecord {
  Family family = Family::hooke;
  bool kohn_sham = false;
  double param = 0.0;              ///< omega (hooke) or Z (helium)
  double interaction_scale = 1.0;  ///< lambda; 0 for Kohn-Sham systems
  double e_total = 0.0;
  double e_remnant = 0.0;          ///< energy of the N-1 system
  std::optional<EnergyComponents> components;
  DensityPtr density;
  StatePtr state;
  std::function<double(double)> potential; ///< v(r), hartree

  double ionization() const { return e_total - e_remnant; }
  std::string label() const;
};

const char *family_name(Family f);
Family parse_family(const std::string &name);

} // namespace metricdft
