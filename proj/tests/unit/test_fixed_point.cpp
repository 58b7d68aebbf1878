#include "qbgk/boundary.hpp"
#include "qbgk/errors.hpp"
#include "qbgk/fixed_point.hpp"
#include "qbgk/transport.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace qbgk;

namespace {

const SlabExample kSlab{1, 1, 10, 11};

struct Slab {
  std::shared_ptr<const BoundaryData> boundary = std::make_shared<const BoundaryData>(kSlab);
  std::shared_ptr<const Grid> grid = std::make_shared<const Grid>(slab_grid_spec(kSlab, 8));
  double tau = 100.0;
  TheoremConstants tc = boundary_constants(*boundary, tau, Statistics::Boson, *grid);
  DistributionField f0 = attenuated_inflow(grid, boundary, tc.a_u, tau);
};

const Slab& slab() {
  static const Slab s;
  return s;
}

DistributionField member(const Slab& s, const Bump& b, double fill) {
  const std::vector<Bump> bumps{b};
  const std::vector<double> w{1.0};
  return perturb_within_bounds(s.f0, s.tc, bumps, w, fill);
}

DistributionField combine(const DistributionField& f, const DistributionField& g, double theta) {
  DistributionField out = f;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = theta * f.values[i] + (1.0 - theta) * g.values[i];
  return out;
}

}  // namespace

TEST(LambdaCheck, AttenuatedInflowIsMember) {
  const Slab& s = slab();
  const LambdaReport r = lambda_check(s.f0, s.tc);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.margin_A, 0.0);
  // Lower bounds hold with room to spare at every x: N(x) >= a_l.
  for (const MomentTriple& m : compute_moments(s.f0)) {
    EXPECT_GE(m.N, s.tc.a_l);
    EXPECT_GE(m.E, s.tc.c_l);
  }
}

TEST(LambdaCheck, NegativeNodeLocated) {
  const Slab& s = slab();
  DistributionField f = s.f0;
  const std::size_t np = s.grid->p_count();
  const std::size_t xi = 3, pi = np / 2 + 5;
  f.values[xi * np + pi] = -1e-3;
  const LambdaReport r = lambda_check(f, s.tc);
  EXPECT_FALSE(r.ok_A);
  EXPECT_FALSE(r.passed());
  EXPECT_DOUBLE_EQ(r.margin_A, -1e-3);
  EXPECT_EQ(r.worst_x_A, xi);
  EXPECT_EQ(r.worst_p_A, pi);
}

TEST(LambdaCheck, DoubledMemberBreaksUpperMassBound) {
  const Slab& s = slab();
  const DistributionField g = member(s, Bump{0.5, 0.3, {0, 0, 0}, 1.0}, 0.9);
  ASSERT_TRUE(lambda_check(g, s.tc).passed());
  DistributionField twice = g;
  for (double& v : twice.values) v *= 2.0;
  const LambdaReport r = lambda_check(twice, s.tc);
  EXPECT_TRUE(r.ok_A);
  EXPECT_FALSE(r.ok_B);
  EXPECT_LT(r.margin_B, 0.0);
}

TEST(LambdaCheck, SlackAbsorbsRoundoffOnly) {
  const Slab& s = slab();
  const DistributionField g = member(s, Bump{0.5, 0.3, {0, 0, 0}, 1.0}, 0.9);
  double max_n = 0.0;
  for (const MomentTriple& m : compute_moments(g)) max_n = std::max(max_n, m.N);
  DistributionField edge = g;
  const double scale = s.tc.a_u * (1.0 + 1e-12) / max_n;
  for (double& v : edge.values) v *= scale;
  EXPECT_FALSE(lambda_check(edge, s.tc).ok_B);
  EXPECT_TRUE(lambda_check(edge, s.tc, 1e-10).ok_B);
  EXPECT_FALSE(lambda_check(edge, s.tc, 1e-13).ok_B);
}

TEST(Probes, PerturbationsStayInLambda) {
  const Slab& s = slab();
  std::mt19937_64 rng(7);
  for (int j = 0; j < 6; ++j) {
    const Bump b = random_bump(rng);
    const DistributionField g = member(s, b, 0.3 + 0.1 * j);
    const LambdaReport r = lambda_check(g, s.tc);
    EXPECT_TRUE(r.passed()) << "probe " << j;
    EXPECT_GT(weighted_distance(g, s.f0), 0.0);
  }
}

TEST(Probes, RejectsBadArguments) {
  const Slab& s = slab();
  const std::vector<Bump> one{Bump{}};
  const std::vector<double> two{0.5, 0.5};
  EXPECT_THROW(perturb_within_bounds(s.f0, s.tc, one, two, 0.5), ValidationError);
  const std::vector<double> w{1.0};
  EXPECT_THROW(perturb_within_bounds(s.f0, s.tc, one, w, 1.0), ValidationError);
  EXPECT_THROW(perturb_within_bounds(s.f0, s.tc, one, w, 0.0), ValidationError);
}

TEST(Probes, ConvexCombinationsStayInLambda) {
  const Slab& s = slab();
  const DistributionField f = member(s, Bump{0.2, 0.2, {1.0, 0.5, 0.0}, 0.8}, 0.8);
  const DistributionField g = member(s, Bump{0.8, 0.3, {-1.5, 0.0, -0.5}, 1.2}, 0.6);
  for (double theta : {0.25, 0.5, 0.75}) {
    const DistributionField h = combine(f, g, theta);
    EXPECT_TRUE(lambda_check(h, s.tc).passed()) << theta;
    for (const MomentTriple& m : compute_moments(h)) EXPECT_GE(m.N * m.E - m.P.norm2(), s.tc.k);
  }
}

TEST(Contraction, ZeroDistancePairSkipped) {
  const Slab& s = slab();
  const DistributionField phi = apply_solution_operator(s.f0, s.tau, Statistics::Boson);
  EXPECT_FALSE(contraction_ratio(s.f0, phi, s.f0, s.tau, Statistics::Boson).has_value());
  const DistributionField g = member(s, Bump{}, 0.5);
  const auto r = contraction_ratio(s.f0, phi, g, s.tau, Statistics::Boson);
  ASSERT_TRUE(r.has_value());
  EXPECT_GT(*r, 0.0);
  EXPECT_TRUE(std::isfinite(*r));
}

TEST(Contraction, ProbesReportOneRatioEach) {
  const Slab& s = slab();
  const auto c = contraction_estimate(s.boundary, s.tau, Statistics::Boson, s.grid, 3, 11);
  ASSERT_EQ(c.ratios.size(), 3u);
  double worst = 0.0;
  for (double r : c.ratios) worst = std::max(worst, r);
  EXPECT_DOUBLE_EQ(c.estimate, worst);
  EXPECT_THROW(contraction_estimate(s.boundary, s.tau, Statistics::Boson, s.grid, 0), ValidationError);
  const auto again = contraction_estimate(s.boundary, s.tau, Statistics::Boson, s.grid, 3, 11);
  EXPECT_EQ(again.ratios, c.ratios);
}

TEST(Picard, EquilibriumTraceIsImmediateFixedPoint) {
  const EquilibriumParams eq{Statistics::Boson, 1.0, 1.0, {}, Regular{}};
  auto boundary = std::make_shared<const BoundaryData>(EquilibriumTrace{eq});
  GridSpec spec = GridSpec::defaults();
  spec.nx = 8;
  auto grid = std::make_shared<const Grid>(spec);
  PicardConfig cfg;
  cfg.initial = InitialIterate::InflowExtension;
  cfg.policy = LambdaPolicy::Warn;
  for (double tau : {1.0, 100.0}) {
    const SolutionReport r = picard_solve(boundary, tau, Statistics::Boson, grid, cfg);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LE(r.final_distance, 1e-8);
    EXPECT_EQ(r.stop_reason, "tolerance");
  }
}

TEST(Picard, SlabConvergesGeometrically) {
  const Slab& s = slab();
  PicardConfig cfg;
  const SolutionReport r = picard_solve(s.boundary, s.tau, Statistics::Boson, s.grid, cfg);
  ASSERT_TRUE(r.converged) << r.stop_reason;
  EXPECT_TRUE(r.lambda_violations.empty());
  EXPECT_TRUE(r.initial_lambda.passed());
  EXPECT_LE(r.final_distance, cfg.tolerance);
  EXPECT_EQ(r.distance_history.size(), static_cast<std::size_t>(r.iterations));

  const auto c = contraction_estimate(s.boundary, s.tau, Statistics::Boson, s.grid, 4, 42);
  ASSERT_LT(c.estimate, 1.0);
  for (std::size_t n = 1; n < r.distance_history.size(); ++n) {
    EXPECT_LE(r.distance_history[n] / r.distance_history[n - 1], c.estimate + 0.05) << n;
  }

  const DistributionField next = apply_solution_operator(r.solution, s.tau, Statistics::Boson);
  EXPECT_LE(weighted_distance(next, r.solution), 2.0 * cfg.tolerance);

  ASSERT_EQ(r.profiles.size(), s.grid->x_count());
  for (const ProfileRow& row : r.profiles) {
    EXPECT_GE(row.m.N, s.tc.a_l);
    EXPECT_LE(row.m.N, s.tc.a_u);
    EXPECT_GE(row.m.E, s.tc.c_l);
    EXPECT_LE(row.m.E, s.tc.c_u);
    EXPECT_GE(row.m.N * row.m.E - row.m.P.norm2(), s.tc.k);
    EXPECT_TRUE(std::isfinite(row.a));
    EXPECT_TRUE(is_regular(classify(row.m, Statistics::Boson)));
  }
}

TEST(Picard, FermionAnalogueConverges) {
  const Slab& s = slab();
  const SolutionReport r = picard_solve(s.boundary, s.tau, Statistics::Fermion, s.grid);
  EXPECT_TRUE(r.converged) << r.stop_reason;
  EXPECT_LT(r.iterations, 20);
}

TEST(Picard, SmallTauNeverClaimsConvergenceWithViolations) {
  const Slab& s = slab();
  PicardConfig cfg;
  cfg.max_iters = 15;
  for (LambdaPolicy policy : {LambdaPolicy::Abort, LambdaPolicy::Warn}) {
    cfg.policy = policy;
    try {
      const SolutionReport r = picard_solve(s.boundary, 0.01, Statistics::Boson, s.grid, cfg);
      EXPECT_FALSE(r.converged);
      EXPECT_TRUE(r.stop_reason != "tolerance" || !r.lambda_violations.empty()) << r.stop_reason;
    } catch (const RegimeError&) {
      SUCCEED();
    }
  }
}

TEST(Picard, RejectsBadConfig) {
  const Slab& s = slab();
  PicardConfig cfg;
  cfg.tolerance = 0.0;
  EXPECT_THROW(picard_solve(s.boundary, s.tau, Statistics::Boson, s.grid, cfg), ValidationError);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(picard_solve(s.boundary, s.tau, Statistics::Boson, s.grid, cfg), ValidationError);
  EXPECT_THROW(picard_solve(s.boundary, -1.0, Statistics::Boson, s.grid), ValidationError);
}

TEST(Transverse, MaxAbsoluteSum) {
  std::vector<MomentTriple> m(3);
  m[1].P = {5.0, -0.25, 0.5};
  m[2].P = {0.0, 0.1, -0.1};
  EXPECT_DOUBLE_EQ(max_transverse_momentum(m), 0.75);
  EXPECT_EQ(max_transverse_momentum({}), 0.0);
}
