#include "qbgk/transport.hpp"

#include "qbgk/boundary.hpp"
#include "qbgk/equilibrium.hpp"
#include "qbgk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

namespace qbgk {

namespace {

constexpr double kClipFloor = -1e-14;

MomentTriple midpoint(const MomentTriple& a, const MomentTriple& b) {
  return {0.5 * (a.N + b.N), 0.5 * (a.P + b.P), 0.5 * (a.E + b.E)};
}

// K on the tensor grid as 1/(e1 e2 e3 -+ 1), with e_k = e^{a (p_k - u_k)^2}
// and e^c folded into e1.
class SeparableEquilibrium {
 public:
  SeparableEquilibrium(const EquilibriumParams& params, const Grid& grid)
      : params_(params), n23_(grid.n23()) {
    const auto& n1 = grid.p1().nodes;
    const auto& n23 = grid.p23().nodes;
    s1_.resize(n1.size());
    s2_.resize(n23.size());
    s3_.resize(n23.size());
    for (std::size_t k = 0; k < n1.size(); ++k) {
      const double d = n1[k] - params.u.x;
      s1_[k] = params.a * d * d + params.c;
    }
    for (std::size_t k = 0; k < n23.size(); ++k) {
      const double d2 = n23[k] - params.u.y;
      const double d3 = n23[k] - params.u.z;
      s2_[k] = params.a * d2 * d2;
      s3_[k] = params.a * d3 * d3;
    }
    e1_.resize(s1_.size());
    e2_.resize(s2_.size());
    e3_.resize(s3_.size());
    std::transform(s1_.begin(), s1_.end(), e1_.begin(), [](double s) { return std::exp(s); });
    std::transform(s2_.begin(), s2_.end(), e2_.begin(), [](double s) { return std::exp(s); });
    std::transform(s3_.begin(), s3_.end(), e3_.begin(), [](double s) { return std::exp(s); });
  }

  // Row of K over i3 for fixed (i1, i2).
  void row(std::size_t i1, std::size_t i2, double* out) const {
    const double e12 = e1_[i1] * e2_[i2];
    if (params_.stat == Statistics::Fermion) {
      for (std::size_t i3 = 0; i3 < n23_; ++i3) out[i3] = 1.0 / (e12 * e3_[i3] + 1.0);
      return;
    }
    const double s12 = s1_[i1] + s2_[i2];
    for (std::size_t i3 = 0; i3 < n23_; ++i3) {
      const double prod = e12 * e3_[i3];
      out[i3] = prod < 1.001 ? 1.0 / std::expm1(s12 + s3_[i3]) : 1.0 / (prod - 1.0);
    }
  }

 private:
  EquilibriumParams params_;
  std::size_t n23_;
  std::vector<double> s1_, s2_, s3_;
  std::vector<double> e1_, e2_, e3_;
};

}  // namespace

std::vector<double> cumulative_density(std::span<const double> N, double dx) {
  std::vector<double> A(N.size(), 0.0);
  for (std::size_t i = 1; i < N.size(); ++i) A[i] = A[i - 1] + dx * 0.5 * (N[i - 1] + N[i]);
  return A;
}

std::vector<double> cumulative_density(std::span<const MomentTriple> moments, double dx) {
  std::vector<double> N(moments.size());
  for (std::size_t i = 0; i < N.size(); ++i) N[i] = moments[i].N;
  return cumulative_density(N, dx);
}

DistributionField apply_solution_operator(const DistributionField& f, double tau, Statistics stat,
                                          const QuadratureSpec& q, TransportDiagnostics* diag) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau", "must be positive and finite");
  const Grid& grid = *f.grid;
  const std::size_t nx = static_cast<std::size_t>(grid.nx());
  const std::size_t np = grid.p_count();
  const std::size_t n1 = grid.n1();
  const std::size_t m = grid.n23();
  const std::size_t plane = m * m;
  const std::size_t half = grid.first_positive();

  const std::vector<MomentTriple> moments = compute_moments(f);
  const double threshold = beta_threshold(stat, q);
  for (std::size_t i = 0; i <= nx; ++i) {
    const Regime r = classify(moments[i], stat, threshold);
    if (!is_regular(r)) {
      throw RegimeError("x node " + std::to_string(i) + " classifies as " + std::string(regime_name(r)));
    }
  }
  std::vector<EquilibriumParams> params(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const MomentTriple mid = midpoint(moments[j], moments[j + 1]);
    const Regime r = classify(mid, stat, threshold);
    if (!is_regular(r)) {
      throw RegimeError("cell " + std::to_string(j) + " midpoint classifies as " +
                        std::string(regime_name(r)));
    }
    params[j] = solve_parameters(mid, stat, q);
  }
  const std::vector<double> A = cumulative_density(moments, grid.dx());
  const std::vector<double> inflow = f.boundary->on_grid(grid);

  DistributionField out(f.grid, f.boundary);
  std::vector<double> att(n1), gain(n1), krow(m);

  // Gain sweeps: left to right for p1 > 0, right to left for p1 < 0. The
  // slice at the inflow end starts at zero.
  for (std::size_t step = 0; step < nx; ++step) {
    const std::size_t jr = step;           // cell for the rightward sweep
    const std::size_t jl = nx - 1 - step;  // cell for the leftward sweep
    const double dA_r = A[jr + 1] - A[jr];
    const double dA_l = A[jl + 1] - A[jl];
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      const double p1 = grid.p1().nodes[i1];
      const double s = (i1 >= half ? dA_r : dA_l) / (tau * std::abs(p1));
      att[i1] = std::exp(-s);
      gain[i1] = -std::expm1(-s);
    }
    const SeparableEquilibrium kr(params[jr], grid);
    const SeparableEquilibrium kl(params[jl], grid);
    const double* prev_r = out.values.data() + jr * np;
    double* cur_r = out.values.data() + (jr + 1) * np;
    const double* prev_l = out.values.data() + (jl + 1) * np;
    double* cur_l = out.values.data() + jl * np;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      const bool right = i1 >= half;
      const SeparableEquilibrium& k = right ? kr : kl;
      const double* prev = right ? prev_r : prev_l;
      double* cur = right ? cur_r : cur_l;
      for (std::size_t i2 = 0; i2 < m; ++i2) {
        k.row(i1, i2, krow.data());
        const std::size_t base = i1 * plane + i2 * m;
        for (std::size_t i3 = 0; i3 < m; ++i3) {
          cur[base + i3] = att[i1] * prev[base + i3] + gain[i1] * krow[i3];
        }
      }
    }
  }

  // Boundary terms and sign check.
  std::size_t clipped = 0;
  double min_raw = 0.0;
  const double A1 = A[nx];
  for (std::size_t i = 0; i <= nx; ++i) {
    double* slice = out.values.data() + i * np;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      const double p1 = grid.p1().nodes[i1];
      const double depth = i1 >= half ? A[i] : A1 - A[i];
      const double decay = std::exp(-depth / (tau * std::abs(p1)));
      for (std::size_t k = i1 * plane; k < (i1 + 1) * plane; ++k) {
        double v = slice[k] + decay * inflow[k];
        if (v < 0.0) {
          min_raw = std::min(min_raw, v);
          if (v < kClipFloor) {
            throw InvariantError("solution operator produced " + std::to_string(v) + " at x node " +
                                 std::to_string(i));
          }
          v = 0.0;
          ++clipped;
        }
        slice[k] = v;
      }
    }
  }
  if (clipped > 0) {
    std::clog << "warning: clipped " << clipped << " roundoff-negative values (min " << min_raw << ")\n";
  }
  if (diag != nullptr) {
    diag->clipped = clipped;
    diag->min_raw_value = min_raw;
    diag->cell_params = std::move(params);
  }
  return out;
}

DistributionField attenuated_inflow(std::shared_ptr<const Grid> grid,
                                    std::shared_ptr<const BoundaryData> boundary, double total,
                                    double tau) {
  DistributionField f(grid, boundary);
  const std::vector<double> inflow = boundary->on_grid(*grid);
  const std::size_t plane = grid->n23() * grid->n23();
  const std::size_t half = grid->first_positive();
  for (std::size_t i = 0; i < grid->x_count(); ++i) {
    const double x = grid->x()[i];
    auto slice = f.slice(i);
    for (std::size_t i1 = 0; i1 < grid->n1(); ++i1) {
      const double p1 = grid->p1().nodes[i1];
      const double depth = i1 >= half ? total * x : total * (1.0 - x);
      const double decay = std::exp(-depth / (tau * std::abs(p1)));
      for (std::size_t k = i1 * plane; k < (i1 + 1) * plane; ++k) slice[k] = decay * inflow[k];
    }
  }
  return f;
}

DistributionField inflow_extension(std::shared_ptr<const Grid> grid,
                                   std::shared_ptr<const BoundaryData> boundary) {
  DistributionField f(grid, boundary);
  const std::vector<double> inflow = boundary->on_grid(*grid);
  for (std::size_t i = 0; i < grid->x_count(); ++i) std::copy(inflow.begin(), inflow.end(), f.slice(i).begin());
  return f;
}

double attenuation_kernel_integral(const Grid& grid, double tau, double a_l, double C, double x) {
  double sum = 0.0;
  for (std::size_t i1 = grid.first_positive(); i1 < grid.n1(); ++i1) {
    const double p1 = grid.p1().nodes[i1];
    sum += grid.p1().weights[i1] * -std::expm1(-a_l * x / (tau * p1)) * std::exp(-C * p1 * p1);
  }
  return sum / a_l;
}

}  // namespace qbgk
