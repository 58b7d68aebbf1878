#pragma once

#include "qbgk/phase_grid.hpp"
#include "qbgk/quantum_stats.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qbgk {

// A(x_i) = int_0^{x_i} N dy by the trapezoid rule; A(0) = 0.
std::vector<double> cumulative_density(std::span<const double> N, double dx);
std::vector<double> cumulative_density(std::span<const MomentTriple> moments, double dx);

struct TransportDiagnostics {
  std::size_t clipped = 0;      // values in (-1e-14, 0) reset to 0
  double min_raw_value = 0.0;   // most negative value before clipping
  std::vector<EquilibriumParams> cell_params;  // one per slab cell
};

// One application of the mild-solution operator. The gain integral over
// each cell is exact for K frozen at the cell midpoint and A linear in the
// cell. RegimeError if any node or midpoint leaves the regular regime,
// InvariantError if an output value falls below -1e-14.
DistributionField apply_solution_operator(const DistributionField& f, double tau, Statistics stat,
                                          const QuadratureSpec& q = {},
                                          TransportDiagnostics* diag = nullptr);

// e^{-A_x/(tau p1)} f_L for p1 > 0 and e^{-(A_1 - A_x)/(tau |p1|)} f_R for
// p1 < 0, with A linear: A_x = total * x.
DistributionField attenuated_inflow(std::shared_ptr<const Grid> grid,
                                    std::shared_ptr<const BoundaryData> boundary, double total,
                                    double tau);

// Boundary data copied to every x node (no attenuation).
DistributionField inflow_extension(std::shared_ptr<const Grid> grid,
                                   std::shared_ptr<const BoundaryData> boundary);

// Discrete (1/a_l) sum_{p1>0} w1 (1 - e^{-a_l x/(tau p1)}) e^{-C p1^2}: the
// y-integrated attenuation kernel on the grid's p1 nodes.
double attenuation_kernel_integral(const Grid& grid, double tau, double a_l, double C, double x = 1.0);

}  // namespace qbgk
