// Command-line front end: solve, verify, sweep, search-narrative, linearize, export.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "narrative/report.hpp"

using namespace narrative;
using nlohmann::json;

namespace {

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  try {
    return json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(field, std::string("JSON parse error: ") + e.what());
  }
}

ShortDag parse_short_dag(const std::string& name) {
  if (name == "lever") return ShortDag::lever;
  if (name == "collider") return ShortDag::collider;
  throw ConfigError("dag", "expected lever or collider");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium narratives over binary causal models"};
  app.require_subcommand(1);

  std::string scenario, out_path;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario for its equilibrium");
  solve_cmd->add_option("--scenario", scenario, "scenario JSON file or built-in name")->required();
  solve_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  std::string builtin;
  std::optional<double> k, eps, delta, d_star;
  auto* verify_cmd = app.add_subcommand("verify", "Compare a built-in scenario to its closed form");
  verify_cmd->add_option("builtin", builtin, "claim1, claim2, short-narratives or opportunity")
      ->required();
  verify_cmd->add_option("--k", k, "quadratic cost coefficient");
  verify_cmd->add_option("--eps", eps, "policy bound epsilon");
  verify_cmd->add_option("--delta", delta, "full-support perturbation");
  verify_cmd->add_option("--d-star", d_star, "ideal policy");
  verify_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  std::string param, range;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a parameter range, CSV output");
  sweep_cmd->add_option("--scenario", scenario, "scenario JSON file or built-in name")->required();
  sweep_cmd->add_option("--param", param, "k, exponent, mu, d_star, epsilon or delta")->required();
  sweep_cmd->add_option("--range", range, "A:B:STEP")->required();
  sweep_cmd->add_option("--out", out_path, "CSV destination (stdout if omitted)");

  std::string dag_name;
  double alpha = 0.5, mu = 0.5, grid = 0.05;
  int target = 1;
  auto* search_cmd =
      app.add_subcommand("search-narrative", "Best three-variable narrative for one action");
  search_cmd->add_option("--dag", dag_name, "lever or collider")
      ->required()
      ->check(CLI::IsMember({"lever", "collider"}));
  search_cmd->add_option("--alpha", alpha, "action frequency")->required();
  search_cmd->add_option("--mu", mu, "outcome probability")->required();
  search_cmd->add_option("--target", target, "action whose outcome belief is maximised")
      ->required()
      ->check(CLI::IsMember({0, 1}));
  search_cmd->add_option("--grid", grid, "local refinement step");

  std::string dag_file, dist_file;
  auto* lin_cmd = app.add_subcommand("linearize", "Reduce a perfect-DAG belief to a chain");
  lin_cmd->add_option("--dag", dag_file, "DAG JSON file")->required();
  lin_cmd->add_option("--dist", dist_file, "distribution JSON file")->required();

  std::string export_name;
  auto* export_cmd = app.add_subcommand("export", "Print a built-in scenario as JSON");
  export_cmd->add_option("builtin", export_name, "built-in scenario name")->required();
  export_cmd->add_option("--out", out_path, "write the scenario here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (solve_cmd->parsed()) {
      const auto result = run_solve(load_scenario(scenario));
      write_output(result.report.dump(2) + "\n", out_path);
      if (result.exit_code == kExitNoEquilibrium)
        std::cerr << "error: " << result.report.value("diagnostic", "") << "\n";
      return result.exit_code;
    }
    if (verify_cmd->parsed()) {
      const auto result = run_verify(builtin, {k, eps, delta, d_star});
      write_output(result.report.dump(2) + "\n", out_path);
      std::cerr << builtin << ": " << (result.report["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
      return result.exit_code;
    }
    if (sweep_cmd->parsed()) {
      const auto result = run_sweep(load_scenario(scenario), param, SweepRange::parse(range));
      write_output(result.csv, out_path);
      return result.exit_code;
    }
    if (search_cmd->parsed()) {
      NarrativeSearchOptions options;
      options.grid = grid;
      const auto result = run_search(parse_short_dag(dag_name), alpha, mu, target, options);
      std::cout << result.report.dump(2) << "\n";
      return result.exit_code;
    }
    if (export_cmd->parsed()) {
      write_output(emit_scenario(builtin_scenario(export_name)), out_path);
      return kExitOk;
    }
    if (lin_cmd->parsed()) {
      const auto result =
          run_linearize(read_json_file(dag_file, "dag"), read_json_file(dist_file, "dist"));
      std::cout << result.report.dump(2) << "\n";
      return result.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
