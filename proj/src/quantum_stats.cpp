#include "qbgk/quantum_stats.hpp"

#include "qbgk/errors.hpp"
#include "qbgk/gauss_legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qbgk {

namespace {

constexpr double kFermionEdgeOffset = 1e-12;

// Occupation 1/(e^s -+ 1), evaluated without cancellation for small s.
double occupation(double s, Statistics stat) {
  if (stat == Statistics::Boson) return 1.0 / std::expm1(s);
  if (s > 0.0) {
    const double e = std::exp(-s);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(s) + 1.0);
}

// Radial breakpoints: uniform panels on [0, R_eff], plus geometric panels
// towards r = 0 when a small positive boson c creates a scale sqrt(c), plus
// panels straddling the Fermi edge r0 = sqrt(-c) for negative fermion c.
std::vector<double> breakpoints(double c, Statistics stat, double cutoff, int panels) {
  const double r_max = std::sqrt(cutoff * cutoff + std::max(0.0, -c));
  std::vector<double> br;
  for (int i = 0; i <= panels; ++i) br.push_back(r_max * i / panels);
  if (stat == Statistics::Boson && c > 0.0 && c < 1.0) {
    const double scale = std::max(std::sqrt(c), 1e-15);
    for (double r = 0.25 * scale; r < 1.0; r *= 2.0) br.push_back(r);
  }
  if (stat == Statistics::Fermion && c < -1.0) {
    const double r0 = std::sqrt(-c);
    const double w = 1.0 / r0;
    br.push_back(r0);
    for (double k : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      if (r0 - k * w > 0.0) br.push_back(r0 - k * w);
      if (r0 + k * w < r_max) br.push_back(r0 + k * w);
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-14 * (1.0 + b); }),
           br.end());
  return br;
}

RadialMoments integrate_once(double c, Statistics stat, const QuadratureSpec& q, int panels) {
  const std::vector<double> br = breakpoints(c, stat, q.radial_cutoff, panels);
  const Rule1D& ref = gauss_legendre(q.panel_order);
  double mass = 0.0;
  double energy = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double half = 0.5 * (br[k + 1] - br[k]);
    const double mid = 0.5 * (br[k + 1] + br[k]);
    double pm = 0.0;
    double pe = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double r = mid + half * ref.nodes[i];
      const double r2 = r * r;
      const double f = occupation(r2 + c, stat) * r2 * ref.weights[i];
      pm += f;
      pe += f * r2;
    }
    mass += half * pm;
    energy += half * pe;
  }
  constexpr double four_pi = 4.0 * std::numbers::pi;
  return {four_pi * mass, four_pi * energy};
}

}  // namespace

std::string_view to_string(Statistics stat) {
  return stat == Statistics::Boson ? "boson" : "fermion";
}

Statistics parse_statistics(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "boson" || lower == "bose") return Statistics::Boson;
  if (lower == "fermion" || lower == "fermi") return Statistics::Fermion;
  throw ValidationError("statistics", "expected 'boson' or 'fermion', got '" + std::string(text) + "'");
}

void QuadratureSpec::validate() const {
  if (radial_panel_count < 1) throw ValidationError("radial_panel_count", "must be positive");
  if (panel_order < 1) throw ValidationError("panel_order", "must be positive");
  if (!(radial_cutoff > 0.0)) throw ValidationError("radial_cutoff", "must be positive");
  if (series_terms < 1) throw ValidationError("series_terms", "must be positive");
  if (!(rel_tolerance > 0.0)) throw ValidationError("rel_tolerance", "must be positive");
  if (max_refinements < 0) throw ValidationError("max_refinements", "must be non-negative");
}

RadialMoments radial_moments(double c, Statistics stat, const QuadratureSpec& q) {
  if (!std::isfinite(c)) throw DomainError("radial_moments: c must be finite");
  if (stat == Statistics::Boson && c < 0.0) {
    throw DomainError("boson momentum integrals require c >= 0, got c = " + std::to_string(c));
  }
  int panels = q.radial_panel_count;
  RadialMoments coarse = integrate_once(c, stat, q, panels);
  for (int level = 0; level <= q.max_refinements; ++level) {
    panels *= 2;
    const RadialMoments fine = integrate_once(c, stat, q, panels);
    const double dm = std::abs(fine.mass - coarse.mass) / fine.mass;
    const double de = std::abs(fine.energy - coarse.energy) / fine.energy;
    if (dm <= q.rel_tolerance && de <= q.rel_tolerance) return fine;
    coarse = fine;
  }
  throw ConvergenceError("radial quadrature did not converge for c = " + std::to_string(c));
}

double mass_integral(double c, Statistics stat, const QuadratureSpec& q) {
  return radial_moments(c, stat, q).mass;
}

double energy_integral(double c, Statistics stat, const QuadratureSpec& q) {
  return radial_moments(c, stat, q).energy;
}

double beta(double c, Statistics stat, const QuadratureSpec& q) {
  const RadialMoments m = radial_moments(c, stat, q);
  return m.mass / std::pow(m.energy, 0.6);
}

double inverse_domain_start(Statistics stat) {
  return stat == Statistics::Boson ? 0.0 : -std::log(3.0) + kFermionEdgeOffset;
}

double beta_threshold(Statistics stat, const QuadratureSpec& q) {
  return stat == Statistics::Boson ? beta(0.0, stat, q) : beta(-std::log(3.0), stat, q);
}

double beta_inverse(double y, Statistics stat, const QuadratureSpec& q, double tol) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw RangeError("beta_inverse: target must be positive and finite");
  }
  const double threshold = beta_threshold(stat, q);
  if (stat == Statistics::Boson) {
    if (y > threshold) {
      throw RangeError("beta_inverse: target " + std::to_string(y) +
                       " exceeds beta_B(0) = " + std::to_string(threshold) + " (condensation)");
    }
    if (y == threshold) return 0.0;
  } else if (y >= threshold) {
    throw RangeError("beta_inverse: target " + std::to_string(y) +
                     " is not below beta_F(-ln 3) = " + std::to_string(threshold) + " (saturation)");
  }

  // beta is strictly decreasing; work with g(c) = ln beta(c) - ln y, which is
  // close to linear for large c (beta ~ e^{-2c/5}).
  const double log_y = std::log(y);
  auto g = [&](double c) { return std::log(beta(c, stat, q)) - log_y; };

  double lo = inverse_domain_start(stat);
  double g_lo = g(lo);
  if (g_lo <= 0.0) return lo;  // y sits in the sliver between beta(lo) and the threshold

  double step = 1.0;
  double hi = lo + step;
  double g_hi = g(hi);
  while (g_hi > 0.0) {
    lo = hi;
    g_lo = g_hi;
    step *= 2.0;
    hi = lo + step;
    if (step > 1e6) throw ConvergenceError("beta_inverse: could not bracket target");
    g_hi = g(hi);
  }

  // Illinois-modified regula falsi with a bisection fallback.
  const double log_tol = std::log1p(tol);
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double c = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    const double gc = g(c);
    if (std::abs(gc) <= 0.5 * log_tol || hi - lo <= 1e-15 * (1.0 + std::abs(c))) return c;
    if (gc > 0.0) {
      lo = c;
      g_lo = gc;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      hi = c;
      g_hi = gc;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
  }
  throw ConvergenceError("beta_inverse: root refinement did not converge");
}

}  // namespace qbgk
