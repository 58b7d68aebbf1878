#pragma once

#include "qbgk/equilibrium.hpp"
#include "qbgk/vec3.hpp"

#include <filesystem>
#include <memory>
#include <variant>
#include <vector>

namespace qbgk {

class Grid;

// f_L = C_L 1{r1 <= p1 <= r2} e^{-(p2^2+p3^2)/2}, f_R the mirror image with C_R.
struct SlabExample {
  double C_L = 1.0;
  double C_R = 1.0;
  double r1 = 10.0;
  double r2 = 11.0;
};

// Incoming halves of a global regular equilibrium.
struct EquilibriumTrace {
  EquilibriumParams params;
};

// Values at the nodes of a momentum tensor grid. Only nodes with p1 > 0
// (left inflow) and p1 < 0 (right inflow) carry meaning.
struct GriddedBoundary {
  std::vector<double> p1;
  std::vector<double> p23;  // shared by p2 and p3
  std::vector<double> values;  // (i1 * n23 + i2) * n23 + i3
};

class BoundaryData {
 public:
  using Source = std::variant<SlabExample, EquilibriumTrace, GriddedBoundary>;

  explicit BoundaryData(Source source);

  const Source& source() const { return source_; }

  // f_L(p) for p1 > 0, f_R(p) for p1 < 0, 0 at p1 = 0. Gridded data only
  // answers at its own nodes (DomainError elsewhere).
  double evaluate(const Vec3& p) const;

  // Values at every momentum node of the grid, in grid order.
  std::vector<double> on_grid(const Grid& grid) const;

  // Positive p1 locations where the data is discontinuous; the grid should
  // put panel breaks there.
  std::vector<double> p1_breakpoints() const;

  // Throws ValidationError for bad parameters.
  void validate() const;

 private:
  Source source_;
};

std::shared_ptr<const BoundaryData> slab_example_boundary(double C_L, double C_R, double r1, double r2);

// Sample any boundary on the grid's momentum nodes.
GriddedBoundary sample_boundary(const BoundaryData& boundary, const Grid& grid);

// CSV with header p1,p2,p3,value; one row per node of the tensor grid.
GriddedBoundary load_gridded_boundary(const std::filesystem::path& path);
void save_gridded_boundary(const GriddedBoundary& data, const std::filesystem::path& path);

}  // namespace qbgk
