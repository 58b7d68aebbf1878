#include "qbgk/theorem_check.hpp"

#include "qbgk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qbgk {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kInnerShareTol = 1e-8;

}  // namespace

TheoremConstants boundary_constants(const BoundaryData& boundary, double tau, Statistics stat,
                                    const Grid& grid, const QuadratureSpec& q,
                                    bool require_integrable) {
  if (!(tau > 0.0)) throw ValidationError("tau", "must be positive");
  const std::vector<double> f = boundary.on_grid(grid);
  const std::size_t m = grid.n23();
  const std::size_t plane = m * m;
  const std::size_t half = grid.first_positive();
  const auto& w = grid.weight();
  const auto& w2 = grid.weight2();

  // Per-p1 sums of the transverse planes.
  std::vector<double> mass(grid.n1(), 0.0), energy(grid.n1(), 0.0);
  for (std::size_t i1 = 0; i1 < grid.n1(); ++i1) {
    for (std::size_t k = i1 * plane; k < (i1 + 1) * plane; ++k) {
      mass[i1] += w[k] * f[k];
      energy[i1] += (w2[k] - w[k]) * f[k];  // w |p|^2
    }
  }

  TheoremConstants tc;
  tc.stat = stat;
  tc.tau = tau;
  for (std::size_t i1 = 0; i1 < grid.n1(); ++i1) {
    tc.a_u += 2.0 * mass[i1];
    tc.c_u += 2.0 * energy[i1];
  }
  double inner_a_s = 0.0;
  double flux_l = 0.0, flux_r = 0.0;
  const double inner_edge = grid.spec().p1_panels.front().hi;
  for (std::size_t i1 = 0; i1 < grid.n1(); ++i1) {
    const double p1 = std::abs(grid.p1().nodes[i1]);
    const double att = std::exp(-tc.a_u / (tau * p1));
    tc.a_l += att * mass[i1];
    tc.c_l += att * energy[i1];
    tc.a_s += mass[i1] / p1;
    tc.c_s += energy[i1] / p1;
    if (p1 < inner_edge) inner_a_s += mass[i1] / p1;
    if (i1 >= half) {
      flux_l += att * mass[i1] * p1;
    } else {
      flux_r += att * mass[i1] * p1;
    }
  }
  tc.k = flux_l * flux_r;
  if (tc.a_s > 0.0 && inner_a_s > kInnerShareTol * tc.a_s) {
    tc.integrable = false;
    if (require_integrable) {
      std::ostringstream msg;
      msg << "1/|p1| integrals not resolved: innermost p1 panel holds " << inner_a_s / tc.a_s
          << " of a_s";
      throw DivergenceError(msg.str());
    }
    tc.a_s = std::numeric_limits<double>::infinity();
    tc.c_s = std::numeric_limits<double>::infinity();
  }
  tc.threshold = beta_threshold(stat, q);
  tc.ratio = tc.k > 0.0 ? std::pow(tc.a_u, 1.6) / std::pow(tc.k, 0.6)
                        : std::numeric_limits<double>::infinity();
  return tc;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const AssumptionResult& r) { return r.passed; });
}

AssumptionReport check_main_assumptions(const BoundaryData& boundary, double tau, Statistics stat,
                                        const Grid& grid, const QuadratureSpec& q) {
  AssumptionReport report;
  const std::vector<double> f = boundary.on_grid(grid);

  AssumptionResult nonneg{"nonnegative", true, 0.0, ""};
  const auto min_it = std::min_element(f.begin(), f.end());
  nonneg.margin = min_it == f.end() ? 0.0 : *min_it;
  nonneg.passed = nonneg.margin >= 0.0;
  if (!nonneg.passed) {
    std::ostringstream d;
    d << "minimum " << nonneg.margin << " at momentum node " << (min_it - f.begin());
    nonneg.detail = d.str();
  }
  report.items.push_back(nonneg);

  report.constants = boundary_constants(boundary, tau, stat, grid, q, false);
  const TheoremConstants& tc = report.constants;

  AssumptionResult integ{"integrable", tc.integrable, 0.0, ""};
  const double values[] = {tc.a_u, tc.a_l, tc.a_s, tc.c_u, tc.c_l, tc.c_s};
  for (double v : values) integ.passed = integ.passed && std::isfinite(v);
  integ.margin = integ.passed ? 1.0 : -1.0;
  if (!integ.passed) integ.detail = "1/|p1|-weighted boundary integrals are not finite on the grid";
  report.items.push_back(integ);

  // Transverse flux int f p_i dp2 dp3 at every p1 node, i = 2, 3.
  AssumptionResult sym{"transverse_symmetry", true, 0.0, ""};
  const std::size_t m = grid.n23();
  const auto& n23 = grid.p23().nodes;
  const auto& w23 = grid.p23().weights;
  double worst = 0.0;
  std::size_t worst_i1 = 0;
  for (std::size_t i1 = 0; i1 < grid.n1(); ++i1) {
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t i2 = 0; i2 < m; ++i2) {
      for (std::size_t i3 = 0; i3 < m; ++i3) {
        const double v = w23[i2] * w23[i3] * f[grid.index(i1, i2, i3)];
        s2 += v * n23[i2];
        s3 += v * n23[i3];
      }
    }
    const double r = std::max(std::abs(s2), std::abs(s3));
    if (r > worst) {
      worst = r;
      worst_i1 = i1;
    }
  }
  sym.margin = kSymmetryTol - worst;
  sym.passed = worst <= kSymmetryTol;
  if (!sym.passed) {
    std::ostringstream d;
    d << "transverse flux " << worst << " at p1 = " << grid.p1().nodes[worst_i1];
    sym.detail = d.str();
  }
  report.items.push_back(sym);

  AssumptionResult adm{"admissible_ratio", tc.ratio < tc.threshold, tc.threshold - tc.ratio, ""};
  {
    std::ostringstream d;
    d << "ratio " << tc.ratio << " vs threshold " << tc.threshold;
    adm.detail = d.str();
  }
  report.items.push_back(adm);
  return report;
}

SlabClosedForm slab_closed_form(const SlabExample& s, double tau) {
  constexpr double pi = std::numbers::pi;
  const double sum = s.C_L + s.C_R;
  const double width = s.r2 - s.r1;
  SlabClosedForm out;
  out.a_u = 4.0 * pi * sum * width;
  out.c_u = 2.0 * sum * 2.0 * pi * ((s.r2 * s.r2 * s.r2 - s.r1 * s.r1 * s.r1) / 3.0 + 2.0 * width);
  out.a_s = 2.0 * pi * sum * std::log(s.r2 / s.r1);
  out.c_s = sum * (pi * (s.r2 * s.r2 - s.r1 * s.r1) + 4.0 * pi * std::log(s.r2 / s.r1));
  const double sq = s.r2 * s.r2 - s.r1 * s.r1;
  out.k_lower = pi * pi * s.C_L * s.C_R * std::exp(-2.0 * out.a_u / (tau * s.r1)) * sq * sq;
  out.ratio_upper = std::pow(out.a_u, 1.6) / std::pow(out.k_lower, 0.6);
  return out;
}

GridSpec slab_grid_spec(const SlabExample& s, int nx) {
  GridSpec spec;
  spec.nx = nx;
  spec.p_max = std::max(24.0, 2.0 * s.r2);
  const std::vector<double> breaks{s.r1, s.r2};
  spec.p1_panels = dyadic_panels(spec.p_max, 12, 6, breaks);
  const std::vector<double> t{0.0, 1.5, 3.0, 5.0, 8.0, spec.p_max};
  spec.p23_panels = graded_panels(t, 6);
  return spec;
}

ParameterBounds parameter_bounds(const TheoremConstants& tc, const QuadratureSpec& q) {
  ParameterBounds b;
  b.c_lo = beta_inverse(std::pow(tc.a_u, 1.6) / std::pow(tc.k, 0.6), tc.stat, q);
  b.c_hi = beta_inverse(std::pow(tc.a_l, 1.6) / std::pow(tc.a_u * tc.c_u, 0.6), tc.stat, q);
  b.a_lo = std::pow(mass_integral(b.c_hi, tc.stat, q), 2.0 / 3.0) * std::pow(tc.a_u, -2.0 / 3.0);
  b.a_hi = std::pow(mass_integral(b.c_lo, tc.stat, q), 2.0 / 3.0) * std::pow(tc.a_l, -2.0 / 3.0);
  return b;
}

}  // namespace qbgk
