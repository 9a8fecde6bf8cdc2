#pragma once

#include <string>
#include <vector>

#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/qrs_analysis.hpp"

namespace cardiotwin {

// Scenario-by-lead dissimilarity heatmap with the max/avg summary columns.
// Representative leads get an outlined cell. Self-contained static SVG.
void save_dtw_heatmap_svg(const DtwTable& table, const std::string& path,
                          const std::string& config_hash);

// Stacked per-lead trace panels, one polyline per record.
void save_lead_traces_svg(const std::vector<EcgRecord>& records, const std::string& path,
                          const std::string& config_hash);

}  // namespace cardiotwin
