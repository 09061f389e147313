#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pensplit/config.hpp"

using namespace pensplit;

int main(int argc, char** argv) {
  CLI::App app{"Penalty-based operator splitting solvers for monotone inclusions"};
  app.require_subcommand(1);

  // solve
  std::string config_path;
  std::optional<std::string> output_override;
  bool override_adm = false;
  CLI::App* solve = app.add_subcommand("solve", "run a solver from a config file");
  solve->add_option("--config", config_path, "path to the run configuration")->required();
  solve->add_flag("--override-admissibility", override_adm,
                  "run even if the schedule fails the hypothesis checks");
  solve->add_option("--output", output_override, "trace output path (overrides config)");

  // check-schedule
  double lambda0 = 1.0, p = 1.0, beta0 = 1.0, q = 0.0;
  std::string solver_name = "fb";
  std::optional<double> mu, eta, knorm;
  CLI::App* check = app.add_subcommand("check-schedule", "classify a polynomial schedule");
  check->add_option("--lambda0", lambda0)->required();
  check->add_option("--p", p)->required();
  check->add_option("--beta0", beta0)->required();
  check->add_option("--q", q)->required();
  check->add_option("--solver", solver_name)->required();
  check->add_option("--mu", mu, "cocoercivity (fb) or reciprocal Lipschitz (fbf) of B");
  check->add_option("--eta", eta, "cocoercivity (fb) or reciprocal Lipschitz (fbf) of D");
  check->add_option("--knorm", knorm, "operator norm of K (composite solver)");

  CLI::App* list = app.add_subcommand("list-problems", "print the problem catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      RunConfig cfg = parse_config_file(config_path);
      if (override_adm) cfg.override_admissibility = true;
      if (output_override) cfg.output_path = *output_override;
      return run_command(cfg);
    }
    if (check->parsed()) {
      const auto kind = solver_kind_from_string(solver_name);
      if (!kind) {
        std::cerr << "unknown solver '" << solver_name << "'\n";
        return 1;
      }
      const PolynomialSchedule s(lambda0, p, beta0, q);
      const ScheduleModuli moduli{mu, eta, knorm};
      std::cout << describe_schedule(s, *kind, moduli);
      const Admissibility adm = admissible_for(s, *kind, moduli);
      return adm.ok ? 0 : 2;
    }
    if (list->parsed()) {
      std::cout << describe_problems();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
