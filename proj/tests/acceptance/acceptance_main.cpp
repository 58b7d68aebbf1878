// Acceptance suite: one PASS/FAIL line per criterion, each with its
// runtime against the allowed limit. Exit status 1 if any criterion fails.

#include "frozen.hpp"
#include "oracles.hpp"

#include "qbgk/boundary.hpp"
#include "qbgk/equilibrium.hpp"
#include "qbgk/errors.hpp"
#include "qbgk/fixed_point.hpp"
#include "qbgk/phase_grid.hpp"
#include "qbgk/quantum_stats.hpp"
#include "qbgk/theorem_check.hpp"
#include "qbgk/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qbgk;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

constexpr double pi = std::numbers::pi;
const SlabExample kSlab{1, 1, 10, 11};
const Statistics kBoth[] = {Statistics::Boson, Statistics::Fermion};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const BoundaryData> slab_boundary() { return std::make_shared<const BoundaryData>(kSlab); }

std::shared_ptr<const Grid> slab_grid(int nx) {
  return std::make_shared<const Grid>(slab_grid_spec(kSlab, nx));
}

std::shared_ptr<const Grid> default_grid(int nx) {
  GridSpec spec = GridSpec::defaults();
  spec.nx = nx;
  return std::make_shared<const Grid>(spec);
}

// --- 1 ---------------------------------------------------------------------

Outcome slab_reproduction() {
  const Grid g(slab_grid_spec(kSlab, 1));
  const auto tc = boundary_constants(BoundaryData(kSlab), 100.0, Statistics::Boson, g);
  const double k_bound = pi * pi * std::exp(-16.0 * pi / 1000.0) * 441.0;
  const double a_err = rel(tc.a_u, 8.0 * pi);
  const bool ok = a_err <= 1e-8 && tc.k >= k_bound && tc.ratio < tc.threshold &&
                  std::abs(tc.threshold - frozen::beta_boson_c0) < 1e-8 * frozen::beta_boson_c0;
  return {ok, fmt("a_u/8pi-1=%.2e k=%.6g>=%.6g ratio=%.5f<beta_B(0)=%.5f", a_err, tc.k, k_bound, tc.ratio,
                  tc.threshold)};
}

// --- 2 ---------------------------------------------------------------------

Outcome beta_oracles() {
  double worst = 0.0;
  for (Statistics s : kBoth) {
    for (int i = 0; i < 20; ++i) {
      double c, m_ref, e_ref;
      if (s == Statistics::Boson) {
        c = 0.0 + 20.0 * std::pow(i / 19.0, 2.0);
        m_ref = oracle::series_mass(c, s);
        e_ref = oracle::series_energy(c, s);
      } else {
        c = -6.0 + 26.0 * std::pow(i / 19.0, 1.5);
        m_ref = oracle::gsl_fermion_mass(c);
        e_ref = oracle::gsl_fermion_energy(c);
      }
      worst = std::max({worst, rel(mass_integral(c, s), m_ref), rel(energy_integral(c, s), e_ref)});
    }
  }
  // Boson c = 0 from zeta values directly.
  const double m0 = std::pow(pi, 1.5) * oracle::zeta(1.5);
  const double e0 = 1.5 * std::pow(pi, 1.5) * oracle::zeta(2.5);
  const double b0_ref = m0 / std::pow(e0, 0.6);
  const double b_err = rel(beta(0.0, Statistics::Boson), b0_ref);
  return {worst <= 1e-9 && b_err <= 1e-8,
          fmt("worst moment rel err %.2e (40 c), beta_B(0)=%.15g rel err %.2e", worst, b0_ref, b_err)};
}

// --- 3 ---------------------------------------------------------------------

Outcome inversion_round_trip() {
  double worst_y = 0.0, worst_c = 0.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Statistics s : kBoth) {
    const double t = beta_threshold(s);
    const double c0 = inverse_domain_start(s);
    for (int k = 0; k < 100; ++k) {
      const double y = t * std::pow(1e-4, unit(rng));
      const double c = beta_inverse(y, s);
      if (c < c0) return {false, fmt("inverse %.6g below domain start", c)};
      worst_y = std::max(worst_y, rel(beta(c, s), y));
      const double cc = c0 + 1e-6 + 25.0 * unit(rng);
      worst_c = std::max(worst_c, std::abs(beta_inverse(beta(cc, s), s) - cc) / std::max(1.0, std::abs(cc)));
    }
  }
  int rejected = 0;
  auto rejects = [&](double y, Statistics s) {
    try {
      beta_inverse(y, s);
    } catch (const RangeError&) {
      ++rejected;
    }
  };
  rejects(1.001 * beta_threshold(Statistics::Boson), Statistics::Boson);
  rejects(beta_threshold(Statistics::Fermion), Statistics::Fermion);
  rejects(2.0 * beta_threshold(Statistics::Fermion), Statistics::Fermion);
  rejects(0.0, Statistics::Boson);
  rejects(-1.0, Statistics::Fermion);
  return {worst_y <= 1e-8 && worst_c <= 1e-8 && rejected == 5,
          fmt("beta(beta^-1(y)) rel err %.2e, beta^-1(beta(c)) err %.2e, %d/5 out-of-range rejected", worst_y,
              worst_c, rejected)};
}

// --- 4 ---------------------------------------------------------------------

Outcome moment_round_trip() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_param = 0.0;
  for (Statistics s : kBoth) {
    for (int k = 0; k < 100; ++k) {
      EquilibriumParams p{s, 0.05 * std::pow(100.0, unit(rng)),
                          inverse_domain_start(s) + 0.01 + 15.0 * unit(rng) * unit(rng),
                          {4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0},
                          Regular{}};
      const EquilibriumParams back = solve_parameters(analytic_moments(p), s);
      worst_param = std::max({worst_param, rel(back.a, p.a), std::abs(back.c - p.c) / std::max(1.0, std::abs(p.c)),
                              (back.u - p.u).norm() / std::max(1.0, p.u.norm())});
    }
  }
  const auto grid = default_grid(1);
  double worst_grid = 0.0;
  for (Statistics s : kBoth) {
    for (int k = 0; k < 12; ++k) {
      EquilibriumParams p{s, 0.8 + 2.0 * unit(rng), inverse_domain_start(s) + 0.05 + 4.0 * unit(rng),
                          {unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5}, Regular{}};
      std::vector<double> v(grid->p_count());
      for (std::size_t q = 0; q < v.size(); ++q) v[q] = evaluate(p, grid->momentum(q));
      const MomentTriple gm = slice_moments(*grid, v);
      const MomentTriple am = analytic_moments(p);
      worst_grid = std::max({worst_grid, rel(gm.N, am.N), rel(gm.E, am.E), (gm.P - am.P).norm() / am.N});
    }
  }
  return {worst_param <= 1e-7 && worst_grid <= 1e-6,
          fmt("parameter round trip err %.2e (200 sets), grid vs analytic moments %.2e (24 sets)", worst_param,
              worst_grid)};
}

// --- 5 ---------------------------------------------------------------------

Outcome exact_fixed_point() {
  const auto grid = default_grid(64);
  const EquilibriumParams p{Statistics::Boson, 1.0, 0.5, {0.2, -0.1, 0.0}, Regular{}};
  const auto boundary = std::make_shared<const BoundaryData>(EquilibriumTrace{p});
  const DistributionField f = equilibrium_field(grid, boundary, p);
  double worst = 0.0;
  std::string d;
  for (double tau : {1.0, 1e2, 1e4}) {
    const double dist = weighted_distance(apply_solution_operator(f, tau, Statistics::Boson), f);
    worst = std::max(worst, dist);
    d += fmt("tau=%g d=%.2e ", tau, dist);
  }
  return {worst <= 1e-6, d + "(default grid, nx=64)"};
}

// --- 6 ---------------------------------------------------------------------

Outcome end_to_end() {
  const auto boundary = slab_boundary();
  const auto grid = slab_grid(64);
  const double tau = 100.0;
  bool ok = true;
  std::string d;
  for (Statistics s : kBoth) {
    const auto assumptions = check_main_assumptions(*boundary, tau, s, *grid);
    const SolutionReport r = picard_solve(boundary, tau, s, grid);
    const auto ce = contraction_estimate(boundary, tau, s, grid, 4, 42);
    const TheoremConstants& tc = r.constants;

    bool every_iterate = r.initial_lambda.passed();
    for (const auto& rec : r.records) every_iterate = every_iterate && rec.lambda.passed();
    double worst_step = 0.0;
    for (std::size_t n = 1; n < r.distance_history.size(); ++n)
      worst_step = std::max(worst_step, r.distance_history[n] / r.distance_history[n - 1]);
    const bool geometric = ce.estimate < 1.0 && worst_step <= ce.estimate + 0.05;

    bool bounds = r.profiles.size() == grid->x_count();
    bool regular = true;
    for (const ProfileRow& row : r.profiles) {
      const MomentTriple& m = row.m;
      bounds = bounds && m.N >= tc.a_l && m.N <= tc.a_u && m.E >= tc.c_l && m.E <= tc.c_u &&
               m.N * m.E - m.P.norm2() >= tc.k;
      regular = regular && is_regular(classify(m, s)) && std::isfinite(row.a);
    }
    const bool this_ok = assumptions.all_passed() && r.converged && r.lambda_violations.empty() && every_iterate &&
                         geometric && bounds && regular;
    ok = ok && this_ok;
    d += fmt("%s: %s in %d iters, max step ratio %.3f <= est %.3f+0.05, Lambda %s, bounds %s; ",
             std::string(to_string(s)).c_str(), r.converged ? "converged" : "NOT converged", r.iterations,
             worst_step, ce.estimate, every_iterate ? "every iterate" : "VIOLATED", bounds ? "hold" : "FAIL");
  }
  return {ok, d + "(nx=64, tau=100; a non-regular state would have raised in Phi)"};
}

// --- 7 ---------------------------------------------------------------------

Outcome contraction_scaling() {
  const auto boundary = slab_boundary();
  const auto grid = slab_grid(64);
  std::vector<double> est, scaled;
  for (double tau : {1e2, 1e3, 1e4}) {
    const auto ce = contraction_estimate(boundary, tau, Statistics::Boson, grid, 4, 42);
    est.push_back(ce.estimate);
    scaled.push_back(ce.estimate * tau / (std::log(tau) + 1.0));
  }
  const bool decreasing = est[0] > est[1] && est[1] > est[2];
  const double spread = *std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end());

  // Discrete kernel integral: value * tau / (ln tau + 1) against one fitted constant.
  std::vector<double> kscaled;
  for (double tau : {1e1, 1e2, 1e3, 1e4}) {
    kscaled.push_back(attenuation_kernel_integral(*grid, tau, 1.0, 1.0) * tau / (std::log(tau) + 1.0));
  }
  const double c_fit = *std::max_element(kscaled.begin(), kscaled.end());
  const double k_min = *std::min_element(kscaled.begin(), kscaled.end());
  const bool kernel_ok = k_min >= c_fit / 3.0;
  return {decreasing && spread < 3.0 && kernel_ok,
          fmt("c(tau)=%.4g,%.4g,%.4g scaled=%.3f,%.3f,%.3f spread %.3f<3; kernel scaled in [%.3f, C_fit=%.3f]", est[0],
              est[1], est[2], scaled[0], scaled[1], scaled[2], spread, k_min, c_fit)};
}

// --- 8 ---------------------------------------------------------------------

// The converged solution carries no transverse momentum at all (symmetric
// inflow, symmetric Maxwellian gain), so its sup_x(|P2|+|P3|) is roundoff at
// every tau. The decay rate is exercised on Phi(g) for a Lambda member g
// with transverse momentum: g = solution + a bump off the p2, p3 axes.
Outcome transverse_decay() {
  const auto boundary = slab_boundary();
  const auto grid = slab_grid(64);
  const std::vector<Bump> bump{Bump{0.5, 0.4, {0.0, 1.5, -1.0}, 1.0}};
  const std::vector<double> w{1.0};
  double literal[2], probe[2], scale[2];
  bool members = true, converged = true;
  int i = 0;
  for (double tau : {1e2, 1e4}) {
    const SolutionReport r = picard_solve(boundary, tau, Statistics::Boson, grid);
    converged = converged && r.converged;
    std::vector<MomentTriple> m;
    for (const auto& row : r.profiles) m.push_back(row.m);
    literal[i] = max_transverse_momentum(m);
    scale[i] = 0.0;
    for (const auto& row : m) scale[i] = std::max(scale[i], row.N);
    const DistributionField g = perturb_within_bounds(r.solution, r.constants, bump, w, 0.5);
    members = members && lambda_check(g, r.constants).passed();
    probe[i] = max_transverse_momentum(compute_moments(apply_solution_operator(g, tau, Statistics::Boson)));
    ++i;
  }
  const bool floor = literal[0] <= 1e-10 * scale[0] && literal[1] <= 1e-10 * scale[1];
  const double drop = probe[0] / probe[1];
  return {converged && members && floor && drop >= 5.0,
          fmt("solution sup(|P2|+|P3|)=%.2e,%.2e (roundoff floor %.1e); Phi(g) sup=%.4e,%.4e drop %.1fx>=5", literal[0],
              literal[1], 1e-10 * scale[0], probe[0], probe[1], drop)};
}

// --- 9 ---------------------------------------------------------------------

Outcome convexity() {
  const auto boundary = slab_boundary();
  const auto grid = slab_grid(4);
  const double tau = 100.0;
  const auto tc = boundary_constants(*boundary, tau, Statistics::Boson, *grid);
  const DistributionField f0 = attenuated_inflow(grid, boundary, tc.a_u, tau);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto member = [&] {
    std::vector<Bump> b{random_bump(rng)};
    std::vector<double> w{1.0};
    if (unit(rng) < 0.5) {
      b.push_back(random_bump(rng));
      const double t = unit(rng);
      w = {t, 1.0 - t};
    }
    return perturb_within_bounds(f0, tc, b, w, 0.05 + 0.9 * unit(rng));
  };
  int checked = 0, failed = 0;
  double worst_g = std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 50; ++pair) {
    const DistributionField f = member(), g = member();
    if (!lambda_check(f, tc).passed() || !lambda_check(g, tc).passed()) return {false, "probe outside Lambda"};
    for (double theta : {0.25, 0.5, 0.75}) {
      DistributionField h = f;
      for (std::size_t k = 0; k < h.values.size(); ++k) h.values[k] = theta * f.values[k] + (1 - theta) * g.values[k];
      ++checked;
      if (!lambda_check(h, tc).passed()) ++failed;
      for (const MomentTriple& m : compute_moments(h)) worst_g = std::min(worst_g, (m.N * m.E - m.P.norm2()) / tc.k);
    }
  }
  return {failed == 0 && worst_g >= 1.0,
          fmt("%d combinations, %d outside Lambda, min G/k = %.4f", checked, failed, worst_g)};
}

// --- 10 --------------------------------------------------------------------

// sup over x and sample momenta of |K(f) - K(g)| e^{C|p|^2} / d(f, g), with
// C = a_lo / 4 from the parameter bounds, for g = f + s (h - f0) and s halved.
Outcome equilibrium_continuity() {
  const auto boundary = slab_boundary();
  const auto grid = slab_grid(4);
  const double tau = 100.0;
  const auto tc = boundary_constants(*boundary, tau, Statistics::Boson, *grid);
  const double C = parameter_bounds(tc).a_lo / 4.0;
  const DistributionField f0 = attenuated_inflow(grid, boundary, tc.a_u, tau);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto member = [&] {
    const std::vector<Bump> b{random_bump(rng)};
    const std::vector<double> w{1.0};
    return perturb_within_bounds(f0, tc, b, w, 0.1 + 0.8 * unit(rng));
  };
  auto params_of = [&](const DistributionField& f) {
    std::vector<EquilibriumParams> out;
    for (const MomentTriple& m : compute_moments(f)) out.push_back(solve_parameters(m, Statistics::Boson));
    return out;
  };
  // Sample points spanning the widest equilibrium in play.
  const auto base_params = params_of(f0);
  double a_min = std::numeric_limits<double>::infinity();
  for (const auto& p : base_params) a_min = std::min(a_min, p.a);
  const double radius = 7.0 / std::sqrt(a_min);
  std::vector<Vec3> pts;
  for (int k = 0; k < 3000; ++k) {
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    pts.push_back(v * (radius * std::cbrt(unit(rng)) / v.norm()));
  }
  auto lipschitz = [&](const DistributionField& f, const DistributionField& g) {
    const auto pf = params_of(f), pg = params_of(g);
    double sup = 0.0;
    for (std::size_t i = 0; i < pf.size(); ++i)
      for (const Vec3& p : pts)
        sup = std::max(sup, std::abs(evaluate(pf[i], p) - evaluate(pg[i], p)) * std::exp(C * p.norm2()));
    return sup / weighted_distance(f, g);
  };
  double worst_swing = 1.0, fitted = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const DistributionField f = member(), h = member();
    double r[2];
    for (int half = 0; half < 2; ++half) {
      const double s = half == 0 ? 0.2 : 0.1;
      DistributionField g = f;
      for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] += s * (h.values[k] - f0.values[k]);
      r[half] = lipschitz(f, g);
    }
    fitted = std::max(fitted, r[0]);
    worst_swing = std::max(worst_swing, std::max(r[0] / r[1], r[1] / r[0]));
  }
  return {worst_swing <= 2.0 && std::isfinite(fitted),
          fmt("50 pairs, C=%.4g, fitted Lipschitz %.4g, worst ratio change under halving %.3fx<=2", C, fitted,
              worst_swing)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "slab example constants", 1.0, slab_reproduction},
      {2, "moment integrals vs oracles", 5.0, beta_oracles},
      {3, "beta inversion round trip", 5.0, inversion_round_trip},
      {4, "equilibrium moment round trip", 30.0, moment_round_trip},
      {5, "global equilibrium is a fixed point", 60.0, exact_fixed_point},
      {6, "Picard solve boson and fermion", 300.0, end_to_end},
      {7, "contraction scaling", 600.0, contraction_scaling},
      {8, "transverse momentum decay", 600.0, transverse_decay},
      {9, "convexity of the solution set", 60.0, convexity},
      {10, "equilibrium continuity", 60.0, equilibrium_continuity},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = out.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s [%d] %s (%.2fs / %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                in_time ? "" : ", too slow", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
