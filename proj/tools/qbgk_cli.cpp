// Command line front end: solve, sweep, check, constants.

#include "qbgk/cli_io.hpp"
#include "qbgk/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Stationary quantum BGK slab solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<double> taus;

  auto* solve = app.add_subcommand("solve", "Run the Picard iteration and write profiles, convergence and report");
  solve->add_option("config", config_path, "YAML configuration")->required();

  auto* sweep = app.add_subcommand("sweep", "Solve over a list of tau values and write sweep.csv");
  sweep->add_option("config", config_path, "YAML configuration")->required();
  sweep->add_option("--tau", taus, "Ascending tau values")->required()->delimiter(',');

  auto* check = app.add_subcommand("check", "Check the boundary assumptions only");
  check->add_option("config", config_path, "YAML configuration")->required();

  auto* constants = app.add_subcommand("constants", "Print the boundary constants");
  constants->add_option("config", config_path, "YAML configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qbgk::exit_code::config_error;
  }

  qbgk::SolverConfig config;
  try {
    config = qbgk::load_config(config_path);
    qbgk::apply_environment(config);
  } catch (const qbgk::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return qbgk::exit_code::config_error;
  }

  try {
    if (*solve) return qbgk::run_solve(config, std::cerr);
    if (*sweep) return qbgk::run_sweep(config, taus, std::cerr);
    if (*check) return qbgk::run_check(config, std::cout);
    return qbgk::run_constants(config, std::cout);
  } catch (const qbgk::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return qbgk::exit_code::config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qbgk::exit_code::runtime_error;
  }
}
