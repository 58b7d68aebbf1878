#pragma once

#include "qbgk/boundary.hpp"
#include "qbgk/fixed_point.hpp"
#include "qbgk/phase_grid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace qbgk {

enum class AssumptionPolicy { Enforce, Report };

struct SolverConfig {
  Statistics statistics = Statistics::Boson;
  double tau = 0.0;
  double tolerance = 1e-8;
  int max_iters = 200;
  LambdaPolicy lambda_policy = LambdaPolicy::Abort;
  // enforce: stop before solving when a boundary assumption fails
  AssumptionPolicy assumption_policy = AssumptionPolicy::Enforce;
  InitialIterate initial_iterate = InitialIterate::Attenuated;
  std::uint64_t seed = 42;
  int probe_count = 4;
  std::filesystem::path output_dir = "out";
  std::shared_ptr<const BoundaryData> boundary;
  GridSpec grid;

  PicardConfig picard() const;
};

// Documented YAML format; unknown keys are rejected. Relative gridded
// boundary paths resolve against base_dir.
SolverConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
SolverConfig load_config(const std::filesystem::path& path);

// QBGK_OUTPUT_DIR, when set and non-empty, replaces output_dir.
void apply_environment(SolverConfig& config);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_converged = 1;
inline constexpr int assumptions_failed = 2;
inline constexpr int config_error = 3;
inline constexpr int runtime_error = 4;
}  // namespace exit_code

// Writes profiles.csv, convergence.csv and report.json into output_dir.
int run_solve(const SolverConfig& config, std::ostream& log);

// One sweep.csv row per tau; tau list must be positive and ascending.
int run_sweep(const SolverConfig& config, const std::vector<double>& taus, std::ostream& log);

int run_check(const SolverConfig& config, std::ostream& out);
int run_constants(const SolverConfig& config, std::ostream& out);

// Column headers, fixed.
inline constexpr const char* kProfilesHeader = "x,N,P1,P2,P3,E,a,c";
inline constexpr const char* kConvergenceHeader = "iteration,distance,margin_A,margin_B,margin_C";
inline constexpr const char* kSweepHeader =
    "tau,contraction_estimate,converged,iterations,max_transverse_momentum,scaled_contraction";

void write_profiles_csv(const std::vector<ProfileRow>& rows, const std::filesystem::path& path);
void write_convergence_csv(const SolutionReport& report, const std::filesystem::path& path);

}  // namespace qbgk
