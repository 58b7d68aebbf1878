#pragma once

#include "qbgk/equilibrium.hpp"
#include "qbgk/gauss_legendre.hpp"
#include "qbgk/vec3.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qbgk {

class BoundaryData;

// Slab x momentum discretisation. Panels are given for the positive half
// axis and mirrored to the negative one.
struct GridSpec {
  int nx = 64;
  std::vector<Panel> p1_panels;
  std::vector<Panel> p23_panels;
  double p_max = 8.0;

  // nx 64, p_max 8, 10 dyadic p1 levels of order 8 (including the inner
  // sliver [0, p_max/1024]), transverse breaks 0,1,2,3.5,5.5,8 at order 7.
  static GridSpec defaults();
  void validate() const;
};

// Panels with breakpoints p_max * 2^-k for k = 0..levels, plus 0 and any
// extra breakpoints inside (0, p_max).
std::vector<Panel> dyadic_panels(double p_max, int levels, int order,
                                 std::span<const double> extra_breaks = {});

std::vector<Panel> graded_panels(std::span<const double> breaks, int order);

class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  double dx() const { return 1.0 / spec_.nx; }
  // x_i = i / nx for i = 0..nx
  const std::vector<double>& x() const { return x_; }
  std::size_t x_count() const { return x_.size(); }

  const Rule1D& p1() const { return p1_; }
  const Rule1D& p23() const { return p23_; }
  std::size_t n1() const { return p1_.size(); }
  std::size_t n23() const { return p23_.size(); }
  // p1 nodes are ascending and mirrored, so indices [n1/2, n1) carry p1 > 0
  std::size_t first_positive() const { return p1_.size() / 2; }
  std::size_t p_count() const { return n1() * n23() * n23(); }

  std::size_t index(std::size_t i1, std::size_t i2, std::size_t i3) const {
    return (i1 * n23() + i2) * n23() + i3;
  }
  Vec3 momentum(std::size_t p) const;
  // Tensor weight w1 w2 w3 and the same times (1 + |p|^2).
  const std::vector<double>& weight() const { return weight_; }
  const std::vector<double>& weight2() const { return weight2_; }

  bool same_as(const Grid& other) const;

 private:
  GridSpec spec_;
  std::vector<double> x_;
  Rule1D p1_;
  Rule1D p23_;
  std::vector<double> weight_;
  std::vector<double> weight2_;
};

// Values of f on every (x node, momentum node), stored x-major.
struct DistributionField {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const BoundaryData> boundary;
  std::vector<double> values;

  DistributionField() = default;
  DistributionField(std::shared_ptr<const Grid> g, std::shared_ptr<const BoundaryData> b);

  std::span<double> slice(std::size_t i) {
    return {values.data() + i * grid->p_count(), grid->p_count()};
  }
  std::span<const double> slice(std::size_t i) const {
    return {values.data() + i * grid->p_count(), grid->p_count()};
  }
};

// Moments of one momentum slice, without validation.
MomentTriple slice_moments(const Grid& grid, std::span<const double> values);

// Moments at every x node; InvariantError if any slice is not a valid triple.
std::vector<MomentTriple> compute_moments(const DistributionField& f);

// Same sums without validation, used for reporting on fields that may sit
// outside the admissible set.
std::vector<MomentTriple> raw_moments(const DistributionField& f);

// max_x sum_p w (1 + |p|^2) |f - g|
double weighted_distance(const DistributionField& f, const DistributionField& g);

// Fill a field with a regular equilibrium at every x node.
DistributionField equilibrium_field(std::shared_ptr<const Grid> grid,
                                    std::shared_ptr<const BoundaryData> boundary,
                                    const EquilibriumParams& params);

}  // namespace qbgk
