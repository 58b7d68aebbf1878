#pragma once

#include "qbgk/phase_grid.hpp"
#include "qbgk/theorem_check.hpp"
#include "qbgk/transport.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qbgk {

enum class LambdaPolicy { Abort, Warn };
enum class InitialIterate { Attenuated, InflowExtension };

// Membership in the solution set: (A) f >= 0, (B) a_l <= N <= a_u and
// c_l <= E <= c_u, (C) N E - |P|^2 >= k. Margins for (B) and (C) are
// relative to a_u, c_u and k; (A) reports the smallest value.
struct LambdaReport {
  double margin_A = 0.0;
  double margin_B = 0.0;
  double margin_C = 0.0;
  std::size_t worst_x_A = 0, worst_p_A = 0;
  std::size_t worst_x_B = 0;
  std::size_t worst_x_C = 0;
  bool ok_A = true, ok_B = true, ok_C = true;

  bool passed() const { return ok_A && ok_B && ok_C; }
};

// rel_slack loosens (B) and (C) by that fraction, to absorb roundoff.
LambdaReport lambda_check(const DistributionField& f, const TheoremConstants& tc, double rel_slack = 0.0);

struct PicardConfig {
  double tolerance = 1e-8;
  int max_iters = 200;
  LambdaPolicy policy = LambdaPolicy::Abort;
  InitialIterate initial = InitialIterate::Attenuated;
  double lambda_slack = 1e-10;
  QuadratureSpec quad{};
};

struct LambdaViolation {
  int iterate = 0;
  char condition = 'A';
  double margin = 0.0;
  std::size_t x_index = 0;
};

struct IterateRecord {
  int iteration = 0;
  double distance = 0.0;  // d(f_n, f_{n-1})
  LambdaReport lambda;
};

struct ProfileRow {
  double x = 0.0;
  MomentTriple m;
  double a = 0.0;  // NaN where the moments are not regular
  double c = 0.0;
};

struct SolutionReport {
  bool converged = false;
  int iterations = 0;
  double final_distance = 0.0;
  std::vector<double> distance_history;
  std::vector<LambdaViolation> lambda_violations;
  std::vector<IterateRecord> records;
  LambdaReport initial_lambda;
  std::vector<ProfileRow> profiles;
  TheoremConstants constants;
  std::string stop_reason;
  DistributionField solution;
};

// Picard iteration f <- Phi(f). Does not verify the boundary assumptions
// (callers decide via check_main_assumptions). Never throws on
// non-convergence; RegimeError from the operator propagates. converged
// means distance <= tolerance with no recorded violation.
SolutionReport picard_solve(std::shared_ptr<const BoundaryData> boundary, double tau, Statistics stat,
                            std::shared_ptr<const Grid> grid, const PicardConfig& config = {});

// Profile rows (x, moments, a, c) of a field.
std::vector<ProfileRow> field_profiles(const DistributionField& f, Statistics stat,
                                       const QuadratureSpec& q = {});

// A nonnegative bump h(x, p) = phi(x) e^{-|p - center|^2 / (2 sigma^2)},
// phi(x) = e^{-(x - x0)^2 / (2 x_width^2)}.
struct Bump {
  double x0 = 0.5;
  double x_width = 0.3;
  Vec3 center{};
  double sigma = 1.0;
};

Bump random_bump(std::mt19937_64& rng);

// base + amp * sum_k weights[k] * bump_k with amp chosen so the largest
// increase of N reaches fill * (a_u - max N_base) and likewise for E.
// Adding a nonnegative field keeps (A), the lower halves of (B) and (C).
DistributionField perturb_within_bounds(const DistributionField& base, const TheoremConstants& tc,
                                        std::span<const Bump> bumps, std::span<const double> weights,
                                        double fill);

struct ContractionResult {
  double estimate = 0.0;
  std::vector<double> ratios;  // one per probe pair, NaN for skipped pairs
  TheoremConstants constants;
};

// d(Phi f, Phi g) / d(f, g) given phi_f = Phi f; empty when d(f, g) = 0.
std::optional<double> contraction_ratio(const DistributionField& f, const DistributionField& phi_f,
                                        const DistributionField& g, double tau, Statistics stat,
                                        const QuadratureSpec& q = {});

// max over probes g of d(Phi f0, Phi g) / d(f0, g). The base f0 is the
// attenuated inflow; even probes add one random bump, odd probes a convex
// combination of two. Pairs at distance 0 are skipped.
ContractionResult contraction_estimate(std::shared_ptr<const BoundaryData> boundary, double tau,
                                       Statistics stat, std::shared_ptr<const Grid> grid,
                                       int probe_count = 4, std::uint64_t seed = 42,
                                       const QuadratureSpec& q = {});

// max_x (|P2| + |P3|)
double max_transverse_momentum(std::span<const MomentTriple> moments);

}  // namespace qbgk
