#include "qbgk/equilibrium.hpp"

#include "qbgk/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qbgk {

double MomentTriple::density_ratio() const {
  return std::pow(N, 1.6) / std::pow(excess(), 0.6);
}

void MomentTriple::validate() const {
  if (!(N > 0.0) || !std::isfinite(N)) {
    throw InvariantError("moment triple: mass must be positive, got " + std::to_string(N));
  }
  if (!(E > 0.0) || !std::isfinite(E)) {
    throw InvariantError("moment triple: energy must be positive, got " + std::to_string(E));
  }
  if (!(excess() > 0.0)) {
    throw InvariantError("moment triple: E N - |P|^2 must be positive");
  }
}

std::string_view regime_name(const Regime& r) {
  switch (r.index()) {
    case 0: return "regular";
    case 1: return "condensed";
    default: return "saturated";
  }
}

Regime classify(const MomentTriple& m, Statistics stat, double threshold) {
  m.validate();
  const double rho = m.density_ratio();
  if (stat == Statistics::Boson) {
    if (rho <= threshold) return Regular{};
    const double thermal = m.E - m.P.norm2() / m.N;
    return Condensed{m.N - threshold * std::pow(thermal, 0.6)};
  }
  if (rho < threshold) return Regular{};
  return Saturated{std::cbrt(3.0 * m.N / (4.0 * std::numbers::pi))};
}

Regime classify(const MomentTriple& m, Statistics stat, const QuadratureSpec& q) {
  return classify(m, stat, beta_threshold(stat, q));
}

EquilibriumParams solve_parameters(const MomentTriple& m, Statistics stat, const QuadratureSpec& q) {
  const Regime regime = classify(m, stat, q);
  if (!is_regular(regime)) {
    throw RegimeError("solve_parameters: moments classify as " + std::string(regime_name(regime)));
  }
  EquilibriumParams params;
  params.stat = stat;
  params.c = beta_inverse(m.density_ratio(), stat, q);
  params.a = std::pow(mass_integral(params.c, stat, q) / m.N, 2.0 / 3.0);
  params.u = m.P / m.N;
  params.regime = Regular{};
  return params;
}

double evaluate(const EquilibriumParams& params, const Vec3& p) {
  if (!is_regular(params.regime)) {
    throw RegimeError("evaluate: equilibrium is " + std::string(regime_name(params.regime)));
  }
  const double s = params.a * (p - params.u).norm2() + params.c;
  if (params.stat == Statistics::Boson) return 1.0 / std::expm1(s);
  return 1.0 / (std::exp(s) + 1.0);
}

double evaluate_saturated(const EquilibriumParams& params, const Vec3& p) {
  const auto* sat = std::get_if<Saturated>(&params.regime);
  if (sat == nullptr) throw RegimeError("evaluate_saturated: equilibrium is not saturated");
  return (p - params.u).norm() <= sat->radius ? 1.0 : 0.0;
}

MomentTriple analytic_moments(const EquilibriumParams& params, const QuadratureSpec& q) {
  if (!is_regular(params.regime)) {
    throw RegimeError("analytic_moments: equilibrium is " + std::string(regime_name(params.regime)));
  }
  if (!(params.a > 0.0)) throw DomainError("analytic_moments: a must be positive");
  const RadialMoments rm = radial_moments(params.c, params.stat, q);
  MomentTriple m;
  m.N = rm.mass / std::pow(params.a, 1.5);
  m.P = m.N * params.u;
  m.E = m.N * params.u.norm2() + rm.energy / std::pow(params.a, 2.5);
  return m;
}

}  // namespace qbgk
