#pragma once

#include <string>
#include <vector>

#include "cardiotwin/run_config.hpp"

namespace cardiotwin {

// Command implementations shared by the CLI. Each writes its artifacts under
// cfg.out_dir and returns the paths written, in order, printing nothing, so
// identical configs produce byte-identical output trees.
std::vector<std::string> cmd_phantom(const RunConfig& cfg);
std::vector<std::string> cmd_simulate(const RunConfig& cfg, const std::string& scenario);
std::vector<std::string> cmd_sweep(const RunConfig& cfg);
std::vector<std::string> cmd_invert(const RunConfig& cfg, const std::string& observed_path,
                                    const std::string& truth_path);
std::vector<std::string> cmd_evaluate(const RunConfig& cfg, const std::string& pred_path,
                                      const std::string& truth_path,
                                      const std::string& scenario);
std::vector<std::string> cmd_report(const RunConfig& cfg);

}  // namespace cardiotwin
