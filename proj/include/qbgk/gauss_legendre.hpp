#pragma once

#include <span>
#include <vector>

namespace qbgk {

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  int order = 0;  // Gauss-Legendre points on this panel
};

// Nodes and weights of a one-dimensional quadrature rule.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
const Rule1D& gauss_legendre(int n);

// Concatenation of Gauss-Legendre rules on each panel, in panel order.
Rule1D composite_rule(std::span<const Panel> panels);

}  // namespace qbgk
