#pragma once

#include <vector>

namespace metricdft::numerics {

enum class WeightKind {
  legendre,  ///< weight 1 on [-1, 1]
  laguerre,  ///< weight x^alpha e^{-x} on [0, inf)
};

struct QuadratureRule1D {
  WeightKind kind = WeightKind::legendre;
  int alpha = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss rule for the given weight. Nodes are found by Newton
/// iteration on the orthogonal polynomial; NumericalError after 100 steps.
QuadratureRule1D gauss_rule(WeightKind kind, int n, int alpha = 0);

/// Cached Gauss-Legendre rule; the returned reference is valid for the
/// lifetime of the program and safe to share between threads.
const QuadratureRule1D &gauss_legendre(int n);

/// Composite Gauss-Legendre nodes/weights on consecutive panels
/// [breaks[i], breaks[i+1]].
struct PanelQuadrature {
  std::vector<double> breaks;
  int order = 16;
  std::vector<double> nodes;
  std::vector<double> weights;

  PanelQuadrature() = default;
  PanelQuadrature(std::vector<double> breaks, int order);

  std::size_t panels() const { return breaks.empty() ? 0 : breaks.size() - 1; }
};

/// Breakpoints 0, inner, inner*ratio, ... up to (and ending exactly at) outer.
std::vector<double> geometric_breaks(double inner, double outer, double ratio);

/// Maps a Legendre rule onto [a, b], appending to nodes/weights.
void append_mapped(const QuadratureRule1D &rule, double a, double b,
                   std::vector<double> &nodes, std::vector<double> &weights);

} // namespace metricdft::numerics
