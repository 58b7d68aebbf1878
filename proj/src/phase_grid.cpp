#include "qbgk/phase_grid.hpp"

#include "qbgk/boundary.hpp"
#include "qbgk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qbgk {

namespace {

void validate_panels(const std::vector<Panel>& panels, double p_max, const char* field) {
  if (panels.empty()) throw ValidationError(field, "at least one panel is required");
  double prev = 0.0;
  for (const Panel& panel : panels) {
    if (panel.order < 1 || panel.order > 256) {
      throw ValidationError(field, "panel order must be in [1, 256]");
    }
    if (!(panel.lo >= prev) || !(panel.hi > panel.lo)) {
      throw ValidationError(field, "panels must be ascending, non-overlapping and start at >= 0");
    }
    prev = panel.hi;
  }
  if (std::abs(prev - p_max) > 1e-12 * p_max) {
    throw ValidationError(field, "outermost panel must end at p_max");
  }
}

Rule1D mirrored(const std::vector<Panel>& panels) {
  const Rule1D half = composite_rule(panels);
  Rule1D full;
  for (std::size_t k = half.size(); k-- > 0;) {
    full.nodes.push_back(-half.nodes[k]);
    full.weights.push_back(half.weights[k]);
  }
  full.nodes.insert(full.nodes.end(), half.nodes.begin(), half.nodes.end());
  full.weights.insert(full.weights.end(), half.weights.begin(), half.weights.end());
  return full;
}

void check_same(const DistributionField& f, const DistributionField& g) {
  if (!f.grid || !g.grid) throw GridMismatchError("field without grid");
  if (f.grid != g.grid && !f.grid->same_as(*g.grid)) {
    throw GridMismatchError("fields live on different grids");
  }
  if (f.values.size() != g.values.size()) throw GridMismatchError("field sizes differ");
}

}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec spec;
  spec.nx = 64;
  spec.p_max = 8.0;
  spec.p1_panels = dyadic_panels(spec.p_max, 10, 8);
  const std::vector<double> breaks{0.0, 1.0, 2.0, 3.5, 5.5, 8.0};
  spec.p23_panels = graded_panels(breaks, 7);
  return spec;
}

void GridSpec::validate() const {
  if (nx < 1) throw ValidationError("nx", "must be a positive integer");
  if (!(p_max > 0.0) || !std::isfinite(p_max)) throw ValidationError("p_max", "must be positive");
  validate_panels(p1_panels, p_max, "p1_panels");
  validate_panels(p23_panels, p_max, "p23_panels");
}

std::vector<Panel> dyadic_panels(double p_max, int levels, int order,
                                 std::span<const double> extra_breaks) {
  if (!(p_max > 0.0)) throw ValidationError("p_max", "must be positive");
  if (levels < 0 || levels > 60) throw ValidationError("p1_levels", "must be in [0, 60]");
  std::vector<double> br{0.0};
  for (int k = levels; k >= 0; --k) br.push_back(std::ldexp(p_max, -k));
  for (double b : extra_breaks) {
    if (!(b > 0.0 && b < p_max)) throw ValidationError("p1_breaks", "must lie inside (0, p_max)");
    br.push_back(b);
  }
  return graded_panels(br, order);
}

std::vector<Panel> graded_panels(std::span<const double> breaks, int order) {
  std::vector<double> br(breaks.begin(), breaks.end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  std::vector<Panel> panels;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) panels.push_back({br[k], br[k + 1], order});
  return panels;
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  x_.resize(spec_.nx + 1);
  for (int i = 0; i <= spec_.nx; ++i) x_[i] = static_cast<double>(i) / spec_.nx;
  p1_ = mirrored(spec_.p1_panels);
  p23_ = mirrored(spec_.p23_panels);
  for (double v : p1_.nodes) {
    if (v == 0.0) throw ValidationError("p1_panels", "a p1 node sits at 0");
  }
  weight_.resize(p_count());
  weight2_.resize(p_count());
  const std::size_t m = n23();
  for (std::size_t i1 = 0; i1 < n1(); ++i1) {
    for (std::size_t i2 = 0; i2 < m; ++i2) {
      for (std::size_t i3 = 0; i3 < m; ++i3) {
        const std::size_t p = index(i1, i2, i3);
        const double w = p1_.weights[i1] * p23_.weights[i2] * p23_.weights[i3];
        const double r2 = p1_.nodes[i1] * p1_.nodes[i1] + p23_.nodes[i2] * p23_.nodes[i2] +
                          p23_.nodes[i3] * p23_.nodes[i3];
        weight_[p] = w;
        weight2_[p] = w * (1.0 + r2);
      }
    }
  }
}

Vec3 Grid::momentum(std::size_t p) const {
  const std::size_t m = n23();
  const std::size_t i3 = p % m;
  const std::size_t i2 = (p / m) % m;
  const std::size_t i1 = p / (m * m);
  return {p1_.nodes[i1], p23_.nodes[i2], p23_.nodes[i3]};
}

bool Grid::same_as(const Grid& other) const {
  return spec_.nx == other.spec_.nx && p1_.nodes == other.p1_.nodes &&
         p1_.weights == other.p1_.weights && p23_.nodes == other.p23_.nodes &&
         p23_.weights == other.p23_.weights;
}

DistributionField::DistributionField(std::shared_ptr<const Grid> g,
                                     std::shared_ptr<const BoundaryData> b)
    : grid(std::move(g)), boundary(std::move(b)), values(grid->x_count() * grid->p_count(), 0.0) {}

MomentTriple slice_moments(const Grid& grid, std::span<const double> values) {
  const std::size_t m = grid.n23();
  const auto& n1 = grid.p1().nodes;
  const auto& w1 = grid.p1().weights;
  const auto& n23 = grid.p23().nodes;
  const auto& w23 = grid.p23().weights;
  double N = 0.0, P1 = 0.0, P2 = 0.0, P3 = 0.0, E = 0.0;
  // Sum the transverse plane first, then weight by the p1 rule.
  for (std::size_t i1 = 0; i1 < grid.n1(); ++i1) {
    double s0 = 0.0, s2 = 0.0, s3 = 0.0, sq = 0.0;
    for (std::size_t i2 = 0; i2 < m; ++i2) {
      const double* row = values.data() + grid.index(i1, i2, 0);
      double r0 = 0.0, r3 = 0.0, rq = 0.0;
      for (std::size_t i3 = 0; i3 < m; ++i3) {
        const double v = row[i3] * w23[i3];
        r0 += v;
        r3 += v * n23[i3];
        rq += v * n23[i3] * n23[i3];
      }
      s0 += w23[i2] * r0;
      s2 += w23[i2] * r0 * n23[i2];
      s3 += w23[i2] * r3;
      sq += w23[i2] * (rq + r0 * n23[i2] * n23[i2]);
    }
    const double p = n1[i1];
    N += w1[i1] * s0;
    P1 += w1[i1] * s0 * p;
    P2 += w1[i1] * s2;
    P3 += w1[i1] * s3;
    E += w1[i1] * (sq + s0 * p * p);
  }
  return {N, {P1, P2, P3}, E};
}

std::vector<MomentTriple> raw_moments(const DistributionField& f) {
  std::vector<MomentTriple> out(f.grid->x_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = slice_moments(*f.grid, f.slice(i));
  return out;
}

std::vector<MomentTriple> compute_moments(const DistributionField& f) {
  std::vector<MomentTriple> out = raw_moments(f);
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      out[i].validate();
    } catch (const InvariantError& e) {
      throw InvariantError("x node " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

double weighted_distance(const DistributionField& f, const DistributionField& g) {
  check_same(f, g);
  const Grid& grid = *f.grid;
  const auto& w = grid.weight2();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.x_count(); ++i) {
    const auto a = f.slice(i);
    const auto b = g.slice(i);
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) s += w[p] * std::abs(a[p] - b[p]);
    worst = std::max(worst, s);
  }
  return worst;
}

DistributionField equilibrium_field(std::shared_ptr<const Grid> grid,
                                    std::shared_ptr<const BoundaryData> boundary,
                                    const EquilibriumParams& params) {
  DistributionField f(grid, std::move(boundary));
  auto first = f.slice(0);
  for (std::size_t p = 0; p < first.size(); ++p) first[p] = evaluate(params, grid->momentum(p));
  for (std::size_t i = 1; i < grid->x_count(); ++i) {
    std::copy(first.begin(), first.end(), f.slice(i).begin());
  }
  return f;
}

}  // namespace qbgk
