// kerrcat command-line front end.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kerrcat/cli/commands.hpp"

namespace {

using kerrcat::cli::Overrides;

int run(const std::string& command, const std::string& config_path, const Overrides& overrides, bool gnuplot) {
  using namespace kerrcat::cli;
  try {
    json doc = config_path.empty() ? json{{"schema_version", kerrcat::kConfigSchemaVersion}}
                                   : read_json_file(config_path);
    const RunConfig cfg = parse_config(apply_overrides(std::move(doc), overrides));
    if (command == "params") return cmd_params(cfg, std::cout);
    if (command == "qsurface") return cmd_qsurface(cfg, gnuplot);
    if (command == "evolve") return cmd_evolve(cfg, gnuplot);
    if (command == "validate") return cmd_validate(cfg, std::cout);
    if (command == "sweep") return cmd_sweep(cfg, gnuplot);
    std::cerr << "unknown command " << command << "\n";
    return kExitConfig;
  } catch (const kerrcat::Error& e) {
    std::cerr << "kerrcat " << command << ": " << e.kind() << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "kerrcat " << command << ": ConfigError: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Kerr dynamics of a trapped-electron cyclotron mode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kerrcat::kVersion);

  std::string config_path;
  Overrides o;
  bool gnuplot = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--backend", o.backend, "qsurface backend: analytic | numeric")
        ->check(CLI::IsMember({"analytic", "numeric"}));
    sub->add_option("--time", o.time, "evaluation time: number, t_cat, t_revival, or e.g. 0.5*t_cat");
    sub->add_option("--grid-extent", o.grid_extent, "grid half extent");
    sub->add_option("--grid-res", o.grid_res, "grid nodes per axis (odd)");
    sub->add_option("--cutoff", o.cutoff, "Fock cutoff for numeric paths");
    sub->add_flag("--gnuplot", gnuplot, "also write a gnuplot script next to each CSV");
  };

  auto* params = app.add_subcommand("params", "print derived parameters as JSON");
  auto* qsurface = app.add_subcommand("qsurface", "write a Q-function surface CSV");
  auto* evolve = app.add_subcommand("evolve", "integrate the master equation and write a timeseries CSV");
  auto* validate = app.add_subcommand("validate", "run dual-path and invariant checks");
  auto* sweep = app.add_subcommand("sweep", "cat and decoherence report over alpha0 x gamma");
  for (auto* sub : {params, qsurface, evolve, validate, sweep}) add_common(sub);
  evolve->add_option("--t-final", o.t_final, "final time");
  evolve->add_option("--samples", o.samples, "number of evenly spaced samples");
  sweep->add_option("--alpha0", o.sweep_alpha0, "alpha0 values (real)")->delimiter(',');
  sweep->add_option("--gamma", o.sweep_gamma, "damping values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kerrcat::cli::kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) return run(sub->get_name(), config_path, o, gnuplot);
  return kerrcat::cli::kExitConfig;
}
