#include "qbgk/fixed_point.hpp"

#include "qbgk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qbgk {

LambdaReport lambda_check(const DistributionField& f, const TheoremConstants& tc, double rel_slack) {
  LambdaReport r;
  const Grid& grid = *f.grid;
  r.margin_A = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.x_count(); ++i) {
    const auto s = f.slice(i);
    const auto it = std::min_element(s.begin(), s.end());
    if (*it < r.margin_A) {
      r.margin_A = *it;
      r.worst_x_A = i;
      r.worst_p_A = static_cast<std::size_t>(it - s.begin());
    }
  }
  r.ok_A = r.margin_A >= 0.0;

  const std::vector<MomentTriple> moments = raw_moments(f);
  r.margin_B = std::numeric_limits<double>::infinity();
  r.margin_C = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < moments.size(); ++i) {
    const MomentTriple& m = moments[i];
    const double b = std::min({(m.N - tc.a_l) / tc.a_u, (tc.a_u - m.N) / tc.a_u,
                               (m.E - tc.c_l) / tc.c_u, (tc.c_u - m.E) / tc.c_u});
    if (b < r.margin_B) {
      r.margin_B = b;
      r.worst_x_B = i;
    }
    const double c = tc.k > 0.0 ? (m.excess() - tc.k) / tc.k : -std::numeric_limits<double>::infinity();
    if (c < r.margin_C) {
      r.margin_C = c;
      r.worst_x_C = i;
    }
  }
  r.ok_B = r.margin_B >= -rel_slack;
  r.ok_C = r.margin_C >= -rel_slack;
  return r;
}

std::vector<ProfileRow> field_profiles(const DistributionField& f, Statistics stat, const QuadratureSpec& q) {
  const std::vector<MomentTriple> moments = raw_moments(f);
  std::vector<ProfileRow> rows(moments.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].x = f.grid->x()[i];
    rows[i].m = moments[i];
    rows[i].a = nan;
    rows[i].c = nan;
    try {
      const EquilibriumParams p = solve_parameters(moments[i], stat, q);
      rows[i].a = p.a;
      rows[i].c = p.c;
    } catch (const Error&) {
      // left as NaN; the report carries the regime problem
    }
  }
  return rows;
}

namespace {

void record_violations(const LambdaReport& r, int iterate, std::vector<LambdaViolation>& out) {
  if (!r.ok_A) out.push_back({iterate, 'A', r.margin_A, r.worst_x_A});
  if (!r.ok_B) out.push_back({iterate, 'B', r.margin_B, r.worst_x_B});
  if (!r.ok_C) out.push_back({iterate, 'C', r.margin_C, r.worst_x_C});
}

}  // namespace

SolutionReport picard_solve(std::shared_ptr<const BoundaryData> boundary, double tau, Statistics stat,
                            std::shared_ptr<const Grid> grid, const PicardConfig& config) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau", "must be positive and finite");
  if (!(config.tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");
  if (config.max_iters < 1) throw ValidationError("max_iters", "must be a positive integer");

  SolutionReport report;
  report.constants = boundary_constants(*boundary, tau, stat, *grid, config.quad, false);
  const TheoremConstants& tc = report.constants;

  DistributionField f = config.initial == InitialIterate::Attenuated
                            ? attenuated_inflow(grid, boundary, tc.a_u, tau)
                            : inflow_extension(grid, boundary);
  report.initial_lambda = lambda_check(f, tc, config.lambda_slack);
  record_violations(report.initial_lambda, 0, report.lambda_violations);
  report.stop_reason = "max_iters";

  if (!report.lambda_violations.empty() && config.policy == LambdaPolicy::Abort) {
    report.stop_reason = "lambda_violation";
  } else {
    for (int n = 1; n <= config.max_iters; ++n) {
      DistributionField g = apply_solution_operator(f, tau, stat, config.quad);
      const double d = weighted_distance(g, f);
      f = std::move(g);
      IterateRecord rec{n, d, lambda_check(f, tc, config.lambda_slack)};
      report.records.push_back(rec);
      report.distance_history.push_back(d);
      report.iterations = n;
      report.final_distance = d;
      const std::size_t before = report.lambda_violations.size();
      record_violations(rec.lambda, n, report.lambda_violations);
      if (report.lambda_violations.size() > before && config.policy == LambdaPolicy::Abort) {
        report.stop_reason = "lambda_violation";
        break;
      }
      if (!std::isfinite(d)) {
        report.stop_reason = "non_finite_distance";
        break;
      }
      if (d <= config.tolerance) {
        report.stop_reason = "tolerance";
        break;
      }
    }
  }
  report.converged = report.stop_reason == "tolerance" && report.lambda_violations.empty();
  report.profiles = field_profiles(f, stat, config.quad);
  report.solution = std::move(f);
  return report;
}

Bump random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Bump b;
  b.x0 = unit(rng);
  b.x_width = 0.1 + 0.4 * unit(rng);
  b.center = {-3.0 + 6.0 * unit(rng), -2.0 + 4.0 * unit(rng), -2.0 + 4.0 * unit(rng)};
  b.sigma = 0.6 + 0.9 * unit(rng);
  return b;
}

DistributionField perturb_within_bounds(const DistributionField& base, const TheoremConstants& tc,
                                        std::span<const Bump> bumps, std::span<const double> weights,
                                        double fill) {
  if (bumps.size() != weights.size() || bumps.empty()) {
    throw ValidationError("bumps", "need one weight per bump");
  }
  if (!(fill > 0.0 && fill < 1.0)) throw ValidationError("fill", "must lie in (0, 1)");
  const Grid& grid = *base.grid;
  const std::size_t np = grid.p_count();

  // Unscaled perturbation profile h(p) per bump and its x envelope.
  std::vector<std::vector<double>> shapes(bumps.size(), std::vector<double>(np));
  for (std::size_t b = 0; b < bumps.size(); ++b) {
    const double inv = 1.0 / (2.0 * bumps[b].sigma * bumps[b].sigma);
    for (std::size_t p = 0; p < np; ++p) {
      shapes[b][p] = weights[b] * std::exp(-(grid.momentum(p) - bumps[b].center).norm2() * inv);
    }
  }
  auto envelope = [&](std::size_t b, double x) {
    const double t = (x - bumps[b].x0) / bumps[b].x_width;
    return std::exp(-0.5 * t * t);
  };

  const std::vector<MomentTriple> mb = raw_moments(base);
  std::vector<MomentTriple> mh(bumps.size());
  for (std::size_t b = 0; b < bumps.size(); ++b) mh[b] = slice_moments(grid, shapes[b]);
  double amp = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.x_count(); ++i) {
    double dN = 0.0, dE = 0.0;
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      const double e = envelope(b, grid.x()[i]);
      dN += e * mh[b].N;
      dE += e * mh[b].E;
    }
    if (dN > 0.0) amp = std::min(amp, fill * (tc.a_u - mb[i].N) / dN);
    if (dE > 0.0) amp = std::min(amp, fill * (tc.c_u - mb[i].E) / dE);
  }
  if (!(amp > 0.0) || !std::isfinite(amp)) {
    throw InvariantError("perturb_within_bounds: base field leaves no room under the upper bounds");
  }

  DistributionField out = base;
  for (std::size_t i = 0; i < grid.x_count(); ++i) {
    auto s = out.slice(i);
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      const double e = amp * envelope(b, grid.x()[i]);
      for (std::size_t p = 0; p < np; ++p) s[p] += e * shapes[b][p];
    }
  }
  return out;
}

std::optional<double> contraction_ratio(const DistributionField& f, const DistributionField& phi_f,
                                        const DistributionField& g, double tau, Statistics stat,
                                        const QuadratureSpec& q) {
  const double d_in = weighted_distance(f, g);
  if (!(d_in > 0.0)) return std::nullopt;
  const DistributionField phi_g = apply_solution_operator(g, tau, stat, q);
  return weighted_distance(phi_f, phi_g) / d_in;
}

ContractionResult contraction_estimate(std::shared_ptr<const BoundaryData> boundary, double tau,
                                       Statistics stat, std::shared_ptr<const Grid> grid,
                                       int probe_count, std::uint64_t seed, const QuadratureSpec& q) {
  if (probe_count < 1) throw ValidationError("probe_count", "must be a positive integer");
  ContractionResult result;
  result.constants = boundary_constants(*boundary, tau, stat, *grid, q, false);
  const TheoremConstants& tc = result.constants;

  const DistributionField base = attenuated_inflow(grid, boundary, tc.a_u, tau);
  const DistributionField phi_base = apply_solution_operator(base, tau, stat, q);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int j = 0; j < probe_count; ++j) {
    std::vector<Bump> bumps{random_bump(rng)};
    std::vector<double> weights{1.0};
    if (j % 2 == 1) {
      const double theta = 0.25 + 0.5 * unit(rng);
      bumps.push_back(random_bump(rng));
      weights = {theta, 1.0 - theta};
    }
    const double fill = 0.2 + 0.6 * unit(rng);
    const DistributionField g = perturb_within_bounds(base, tc, bumps, weights, fill);
    const auto ratio = contraction_ratio(base, phi_base, g, tau, stat, q);
    result.ratios.push_back(ratio.value_or(std::numeric_limits<double>::quiet_NaN()));
    if (ratio) result.estimate = std::max(result.estimate, *ratio);
  }
  return result;
}

double max_transverse_momentum(std::span<const MomentTriple> moments) {
  double worst = 0.0;
  for (const MomentTriple& m : moments) worst = std::max(worst, std::abs(m.P.y) + std::abs(m.P.z));
  return worst;
}

}  // namespace qbgk
