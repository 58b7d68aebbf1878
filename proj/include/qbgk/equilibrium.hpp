#pragma once

#include "qbgk/quantum_stats.hpp"
#include "qbgk/vec3.hpp"

#include <string_view>
#include <variant>

namespace qbgk {

// Mass, momentum and energy at one slab position.
struct MomentTriple {
  double N = 0.0;
  Vec3 P{};
  double E = 0.0;

  // E N - |P|^2
  double excess() const { return E * N - P.norm2(); }
  // N^{8/5} / (E N - |P|^2)^{3/5}; compared against the regime threshold.
  double density_ratio() const;
  // Throws InvariantError unless N > 0, E > 0 and E N - |P|^2 > 0.
  void validate() const;
};

struct Regular {
  bool operator==(const Regular&) const = default;
};
struct Condensed {
  double weight = 0.0;  // mass carried by the delta at the drift velocity
  bool operator==(const Condensed&) const = default;
};
struct Saturated {
  double radius = 0.0;  // Fermi sphere radius around the drift
  bool operator==(const Saturated&) const = default;
};

using Regime = std::variant<Regular, Condensed, Saturated>;

inline bool is_regular(const Regime& r) { return std::holds_alternative<Regular>(r); }
std::string_view regime_name(const Regime& r);

struct EquilibriumParams {
  Statistics stat = Statistics::Boson;
  double a = 1.0;
  double c = 0.0;
  Vec3 u{};
  Regime regime = Regular{};
};

// Boson: Regular when rho <= beta_B(0), else Condensed.
// Fermion: Regular when rho < beta_F(-ln 3), else Saturated.
Regime classify(const MomentTriple& m, Statistics stat, const QuadratureSpec& q = {});

// Same as classify with a precomputed threshold, for hot loops.
Regime classify(const MomentTriple& m, Statistics stat, double threshold);

// Regular moments only; RegimeError otherwise.
EquilibriumParams solve_parameters(const MomentTriple& m, Statistics stat, const QuadratureSpec& q = {});

// 1/(e^{a|p-u|^2+c} -+ 1). RegimeError for non-regular params.
double evaluate(const EquilibriumParams& params, const Vec3& p);

// Indicator of the Fermi sphere |p - u| <= radius; needs Saturated params.
double evaluate_saturated(const EquilibriumParams& params, const Vec3& p);

// Closed-form moments of the regular equilibrium.
MomentTriple analytic_moments(const EquilibriumParams& params, const QuadratureSpec& q = {});

}  // namespace qbgk
