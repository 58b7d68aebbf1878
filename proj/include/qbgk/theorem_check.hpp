#pragma once

#include "qbgk/boundary.hpp"
#include "qbgk/phase_grid.hpp"
#include "qbgk/quantum_stats.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qbgk {

// Boundary integrals that bound the solution's moments, evaluated by the
// momentum quadrature of a grid.
struct TheoremConstants {
  double a_u = 0.0, a_l = 0.0, a_s = 0.0;
  double c_u = 0.0, c_l = 0.0, c_s = 0.0;
  double k = 0.0;
  double threshold = 0.0;  // beta_B(0) or beta_F(-ln 3)
  double ratio = 0.0;      // a_u^{8/5} / k^{3/5}; +inf when k = 0
  Statistics stat = Statistics::Boson;
  double tau = 0.0;
  bool integrable = true;  // false when a_s, c_s are not resolved by the grid
};

// a_u first, since a_l, c_l and k carry the e^{-a_u/(tau|p1|)} factor.
// The 1/|p1| integrals count as divergent when the innermost p1 panel
// holds more than 1e-8 of a_s; with require_integrable that raises
// DivergenceError, otherwise a_s and c_s are set to +inf.
TheoremConstants boundary_constants(const BoundaryData& boundary, double tau, Statistics stat,
                                    const Grid& grid, const QuadratureSpec& q = {},
                                    bool require_integrable = true);

struct AssumptionResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // positive when satisfied
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionResult> items;  // nonnegative, integrable, symmetric, admissible
  TheoremConstants constants;
  bool all_passed() const;
};

// Nonnegativity, finiteness of the six integrals, vanishing transverse
// flux at every p1 node (1e-10 absolute) and ratio < threshold.
AssumptionReport check_main_assumptions(const BoundaryData& boundary, double tau, Statistics stat,
                                        const Grid& grid, const QuadratureSpec& q = {});

// Closed forms for the slab example.
struct SlabClosedForm {
  double a_u = 0.0;
  double a_s = 0.0;
  double c_u = 0.0;
  double c_s = 0.0;
  double k_lower = 0.0;      // uses e^{-a_u/(tau r1)} on the whole support
  double ratio_upper = 0.0;  // a_u^{8/5} / k_lower^{3/5}
};
SlabClosedForm slab_closed_form(const SlabExample& s, double tau);

// Momentum grid that resolves the slab example: panel breaks at r1, r2 and
// a transverse cutoff well past the e^{-p^2/2} tail.
GridSpec slab_grid_spec(const SlabExample& s, int nx = 64);

// Ranges of (a, c) reachable from admissible moments.
struct ParameterBounds {
  double c_lo = 0.0, c_hi = 0.0;
  double a_lo = 0.0, a_hi = 0.0;
};
ParameterBounds parameter_bounds(const TheoremConstants& tc, const QuadratureSpec& q = {});

}  // namespace qbgk
