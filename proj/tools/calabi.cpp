#include <iostream>

#include <CLI11.hpp>

#include "calabi/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace calabi::cli;
  CLI::App app{"Calabi flow on flat complex tori"};
  app.require_subcommand(1);

  std::string config;
  auto* flow = app.add_subcommand("flow", "run or sweep the Calabi flow");
  flow->require_subcommand(1);
  auto* run = flow->add_subcommand("run", "evolve one initial potential");
  run->add_option("config", config, "JSON config file")->required();
  auto* sweep = flow->add_subcommand("sweep", "run a grid of single-mode initial potentials");
  sweep->add_option("config", config, "JSON config file")->required();

  auto* check = app.add_subcommand("check", "verify the identities and inequalities on metric pairs");
  check->add_option("config", config, "JSON config file")->required();

  CohomologyArgs coh;
  auto* cohom = app.add_subcommand("cohomology", "print mu and Psi from intersection pairings");
  cohom->add_option("--n", coh.n, "complex dimension")->required();
  cohom->add_option("--c1w", coh.c1w, "[c1].[omega]^(n-1)")->required();
  cohom->add_option("--c1sq", coh.c1sq, "[c1]^2.[omega]^(n-2)")->required();
  cohom->add_option("--wn", coh.wn, "[omega]^n")->required();
  cohom->add_option("--eps", coh.eps, "flag Psi <= -eps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*run) return cmd_flow_run(config, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(config, std::cout, std::cerr);
  if (*check) return cmd_check(config, std::cout, std::cerr);
  return cmd_cohomology(coh, std::cout, std::cerr);
}
