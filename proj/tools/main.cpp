#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cardiotwin/commands.hpp"

using namespace cardiotwin;

int main(int argc, char** argv) {
  CLI::App app{"cardiotwin: biventricular activation, pseudo-ECG QRS synthesis, "
               "sensitivity sweeps, and infarct recovery"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path, out_dir, scenario = "baseline", observed, truth, pred;
  std::uint64_t seed = 0;
  int jobs = 1;

  app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "override the config seed");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "override the output directory");
  CLI::Option* jobs_opt = app.add_option("--jobs", jobs, "override the worker count");

  CLI::App* c_phantom = app.add_subcommand("phantom", "build the mesh and save it");
  CLI::App* c_sim = app.add_subcommand("simulate", "forward-simulate one scenario");
  c_sim->add_option("--scenario", scenario, "catalogue name or 'baseline'");
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "QRS dissimilarity table over the whole catalogue");
  CLI::App* c_invert = app.add_subcommand("invert", "recover infarct parameters from a QRS");
  c_invert->add_option("--observed", observed, "observed 8-lead QRS csv")->required();
  c_invert->add_option("--truth", truth, "ground-truth labeling csv for scoring");
  CLI::App* c_eval = app.add_subcommand("evaluate", "score a predicted labeling");
  c_eval->add_option("--pred", pred, "predicted labeling csv")->required();
  c_eval->add_option("--truth", truth, "ground-truth labeling csv")->required();
  c_eval->add_option("--scenario", scenario, "scenario label for the report row");
  CLI::App* c_report =
      app.add_subcommand("report", "bundle existing artifacts into figures and flag tables");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out_dir = out_dir;
    if (*jobs_opt) {
      cfg.jobs = jobs;
      cfg.inverse.jobs = jobs;
    }
    cfg.validate();

    std::vector<std::string> files;
    if (*c_phantom)
      files = cmd_phantom(cfg);
    else if (*c_sim)
      files = cmd_simulate(cfg, scenario);
    else if (*c_sweep)
      files = cmd_sweep(cfg);
    else if (*c_invert)
      files = cmd_invert(cfg, observed, truth);
    else if (*c_eval)
      files = cmd_evaluate(cfg, pred, truth, scenario);
    else if (*c_report)
      files = cmd_report(cfg);
    for (const std::string& f : files) std::cout << f << "\n";
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
