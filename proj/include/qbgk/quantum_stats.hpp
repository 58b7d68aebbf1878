#pragma once

#include <string_view>

namespace qbgk {

// Bose-Einstein statistics take the "-1" in 1/(e^x -+ 1), Fermi-Dirac the "+1".
enum class Statistics { Boson, Fermion };

std::string_view to_string(Statistics stat);
Statistics parse_statistics(std::string_view text);

// Controls the radial quadrature behind the Bose/Fermi momentum integrals.
struct QuadratureSpec {
  int radial_panel_count = 12;
  int panel_order = 16;
  double radial_cutoff = 12.0;  // integrand tail is e^{-R^2} beyond this radius
  int series_terms = 2'000'000;  // used by the polylog-series cross-check in tests
  double rel_tolerance = 1e-12;  // panel-doubling agreement required
  int max_refinements = 4;

  void validate() const;
};

struct RadialMoments {
  double mass = 0.0;    // 4 pi int r^2 / (e^{r^2+c} -+ 1) dr
  double energy = 0.0;  // 4 pi int r^4 / (e^{r^2+c} -+ 1) dr
};

// Both integrals from a single radial pass. Throws DomainError for a boson
// with c < 0 and ConvergenceError when panel doubling stops agreeing.
RadialMoments radial_moments(double c, Statistics stat, const QuadratureSpec& q = {});

double mass_integral(double c, Statistics stat, const QuadratureSpec& q = {});
double energy_integral(double c, Statistics stat, const QuadratureSpec& q = {});

// beta(c) = mass_integral(c) / energy_integral(c)^{3/5}
double beta(double c, Statistics stat, const QuadratureSpec& q = {});

// Left end of the interval on which beta is inverted: 0 for bosons
// (included), -ln 3 + 1e-12 for fermions.
double inverse_domain_start(Statistics stat);

// beta_B(0) for bosons, beta_F(-ln 3) for fermions.
double beta_threshold(Statistics stat, const QuadratureSpec& q = {});

/// Unique c in the restricted domain with |beta(c) - y| <= tol * y.
///
/// Bosons accept 0 < y <= beta_B(0) (y equal to the threshold maps to c = 0);
/// fermions accept 0 < y < beta_F(-ln 3). Anything else raises RangeError:
/// a target at or above the threshold means the moments describe a condensed
/// or saturated state and must be classified, not inverted.
double beta_inverse(double y, Statistics stat, const QuadratureSpec& q = {}, double tol = 1e-10);

}  // namespace qbgk
