#include "cardiotwin/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cardiotwin/inverse.hpp"
#include "cardiotwin/mesh_io.hpp"
#include "cardiotwin/metrics.hpp"
#include "cardiotwin/qrs_analysis.hpp"
#include "cardiotwin/svg_report.hpp"

namespace cardiotwin {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

Mesh acquire_mesh(const RunConfig& cfg) {
  return cfg.mesh_path.empty() ? build_phantom(cfg.phantom, cfg.seed)
                               : load_mesh(cfg.mesh_path);
}

RootNodes acquire_roots(const RunConfig& cfg, const Mesh& mesh) {
  return cfg.root_targets.empty() ? default_roots(mesh)
                                  : place_roots(mesh, cfg.root_targets);
}

ElectrodeSet acquire_electrodes(const RunConfig& cfg, const Mesh& mesh) {
  return cfg.electrodes.names.empty() ? default_electrodes(mesh) : cfg.electrodes;
}

std::vector<ScenarioSpec> acquire_catalogue(const RunConfig& cfg) {
  return scenario_catalogue(cfg.cv, cfg.catalogue);
}

void require_hash(const std::string& path, const std::string& expected) {
  const std::string found = read_config_hash(path);
  if (found != expected)
    throw ValidationError("artifact " + path + " carries config hash \"" + found +
                          "\", current config is \"" + expected + "\"");
}

}  // namespace

std::vector<std::string> cmd_phantom(const RunConfig& cfg) {
  const Mesh mesh = acquire_mesh(cfg);
  const std::string mesh_file = out_path(cfg, "mesh.txt");
  save_mesh(mesh, mesh_file);

  const std::string summary_file = out_path(cfg, "mesh_summary.txt");
  std::ofstream out(summary_file);
  if (!out) throw ValidationError("cannot open for writing: " + summary_file);
  out << "# config_hash=" << config_hash(cfg) << "\n";
  out << "nodes " << mesh.node_count() << "\n";
  out << "tets " << mesh.elem_count() << "\n";
  out << "mean_edge_mm " << fmt17(mean_edge_length(mesh)) << "\n";
  const BoundingBox bb = bounding_box(mesh.nodes);
  out << "bbox_mm " << fmt17(bb.extent().x) << " " << fmt17(bb.extent().y) << " "
      << fmt17(bb.extent().z) << "\n";
  return {mesh_file, summary_file};
}

std::vector<std::string> cmd_simulate(const RunConfig& cfg, const std::string& scenario) {
  const Mesh mesh = acquire_mesh(cfg);
  const RootNodes roots = acquire_roots(cfg, mesh);
  const ElectrodeSet electrodes = acquire_electrodes(cfg, mesh);
  const std::string hash = config_hash(cfg);

  ForwardResult fr;
  if (scenario == "baseline") {
    fr = forward_simulate(mesh, nullptr, cfg.cv, roots, electrodes, cfg.ecg, scenario);
  } else {
    const std::vector<ScenarioSpec> catalogue = acquire_catalogue(cfg);
    const ScenarioSpec& spec = find_scenario(catalogue, scenario);
    fr = forward_simulate(mesh, &spec.infarct, spec.cv, roots, electrodes, cfg.ecg, scenario);
  }

  const std::string ecg_file = out_path(cfg, "ecg_" + scenario + ".csv");
  const std::string atm_file = out_path(cfg, "atm_" + scenario + ".csv");
  const std::string lab_file = out_path(cfg, "labeling_" + scenario + ".csv");
  save_ecg_csv(fr.record, ecg_file, hash);
  save_activation_csv(fr.atm, atm_file, hash);
  save_labeling_csv(fr.labeling, lab_file, hash);
  return {ecg_file, atm_file, lab_file};
}

std::vector<std::string> cmd_sweep(const RunConfig& cfg) {
  const Mesh mesh = acquire_mesh(cfg);
  const RootNodes roots = acquire_roots(cfg, mesh);
  const ElectrodeSet electrodes = acquire_electrodes(cfg, mesh);
  const std::vector<ScenarioSpec> catalogue = acquire_catalogue(cfg);
  const std::string hash = config_hash(cfg);

  const DtwTable table =
      sensitivity_sweep(mesh, catalogue, cfg.cv, roots, electrodes, cfg.ecg, 1.0, cfg.jobs);

  const std::string csv_file = out_path(cfg, "dtw_table.csv");
  const std::string svg_file = out_path(cfg, "dtw_heatmap.svg");
  save_dtw_csv(table, csv_file, hash);
  save_dtw_heatmap_svg(table, svg_file, hash);
  return {csv_file, svg_file};
}

std::vector<std::string> cmd_invert(const RunConfig& cfg, const std::string& observed_path,
                                    const std::string& truth_path) {
  const Mesh mesh = acquire_mesh(cfg);
  const RootNodes roots = acquire_roots(cfg, mesh);
  const ElectrodeSet electrodes = acquire_electrodes(cfg, mesh);
  const std::string hash = config_hash(cfg);

  const EcgRecord observed = load_ecg_csv(observed_path);
  std::vector<ScenarioSpec> candidates = acquire_catalogue(cfg);
  candidates.pop_back();  // the slow-CV entry is not an inverse candidate

  const InverseResult res =
      invert(observed, mesh, candidates, roots, electrodes, cfg.ecg, cfg.inverse);

  const std::string report_file = out_path(cfg, "inverse_report.txt");
  const std::string lab_file = out_path(cfg, "labeling_predicted.csv");
  save_labeling_csv(res.labeling, lab_file, hash);

  std::ofstream out(report_file);
  if (!out) throw ValidationError("cannot open for writing: " + report_file);
  out << "# config_hash=" << hash << "\n";
  out << "observed " << observed_path << "\n";
  out << "stage1_winner " << res.stage1_name << "\n";
  out << "stage1_objective " << fmt17(res.stage1_objective) << "\n";
  out << "best_ab0 " << fmt17(res.best.center.ab) << "\n";
  out << "best_rt0 " << fmt17(res.best.center.rt) << "\n";
  out << "best_r_tm " << fmt17(res.best.r_tm) << "\n";
  out << "best_r_ab " << fmt17(res.best.r_ab) << "\n";
  out << "best_r_rt " << fmt17(res.best.r_rt) << "\n";
  out << "objective " << fmt17(res.objective) << "\n";
  out << "forward_solves " << res.forward_solves << "\n";
  out << "scar_nodes " << res.labeling.count(TissueClass::scar) << "\n";
  out << "bz_nodes " << res.labeling.count(TissueClass::bz) << "\n";

  if (!truth_path.empty()) {
    const TissueLabeling truth = load_labeling_csv(truth_path);
    const DicePRF scar = dice_precision_recall(res.labeling, truth, TissueClass::scar);
    const DicePRF bz = dice_precision_recall(res.labeling, truth, TissueClass::bz);
    const AhaLocScore loc = aha_loc_score(res.labeling, truth, mesh, 0.5, 0.2, 0.3, cfg.aha);
    out << "dice_scar " << fmt17(scar.dice) << "\n";
    out << "precision_scar " << fmt17(scar.precision) << "\n";
    out << "recall_scar " << fmt17(scar.recall) << "\n";
    out << "dice_bz " << fmt17(bz.dice) << "\n";
    out << "precision_bz " << fmt17(bz.precision) << "\n";
    out << "recall_bz " << fmt17(bz.recall) << "\n";
    out << "aha_loc_score " << fmt17(loc.score) << "\n";
  }
  return {report_file, lab_file};
}

std::vector<std::string> cmd_evaluate(const RunConfig& cfg, const std::string& pred_path,
                                      const std::string& truth_path,
                                      const std::string& scenario) {
  const Mesh mesh = acquire_mesh(cfg);
  const TissueLabeling pred = load_labeling_csv(pred_path);
  const TissueLabeling truth = load_labeling_csv(truth_path);

  const DicePRF scar = dice_precision_recall(pred, truth, TissueClass::scar);
  const DicePRF bz = dice_precision_recall(pred, truth, TissueClass::bz);
  const AhaLocScore loc = aha_loc_score(pred, truth, mesh, 0.5, 0.2, 0.3, cfg.aha);

  const std::string csv_file = out_path(cfg, "evaluation.csv");
  std::ofstream out(csv_file);
  if (!out) throw ValidationError("cannot open for writing: " + csv_file);
  out << "# config_hash=" << config_hash(cfg) << "\n";
  out << "subject,scenario,dice_scar,precision_scar,recall_scar,dice_bz,precision_bz,"
         "recall_bz,aha_loc_score,center_segment_match,segment_iou,center_dist\n";
  out << (cfg.mesh_path.empty() ? "phantom" : cfg.mesh_path) << "," << scenario << ","
      << fmt17(scar.dice) << "," << fmt17(scar.precision) << "," << fmt17(scar.recall) << ","
      << fmt17(bz.dice) << "," << fmt17(bz.precision) << "," << fmt17(bz.recall) << ","
      << fmt17(loc.score) << "," << fmt17(loc.delta) << "," << fmt17(loc.iou) << ","
      << fmt17(loc.center_dist) << "\n";
  return {csv_file};
}

std::vector<std::string> cmd_report(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const std::string table_file = (fs::path(cfg.out_dir) / "dtw_table.csv").string();
  if (!fs::exists(table_file))
    throw ValidationError("report: " + table_file + " not found; run sweep first");
  require_hash(table_file, hash);
  const DtwTable table = load_dtw_csv(table_file);

  std::vector<std::string> ecg_files;
  for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ecg_", 0) == 0 && name.size() > 8 &&
        name.compare(name.size() - 4, 4, ".csv") == 0)
      ecg_files.push_back(entry.path().string());
  }
  std::sort(ecg_files.begin(), ecg_files.end());

  std::vector<EcgRecord> records;
  for (const std::string& f : ecg_files) {
    require_hash(f, hash);
    records.push_back(load_ecg_csv(f));
  }

  std::vector<std::string> written;
  const std::string heatmap_file = out_path(cfg, "report_heatmap.svg");
  save_dtw_heatmap_svg(table, heatmap_file, hash);
  written.push_back(heatmap_file);

  if (!records.empty()) {
    const std::string traces_file = out_path(cfg, "report_traces.svg");
    save_lead_traces_svg(records, traces_file, hash);
    written.push_back(traces_file);

    // Abnormality flags need a baseline; emitted when one is present.
    const auto baseline = std::find_if(records.begin(), records.end(), [](const EcgRecord& r) {
      return r.scenario == "baseline";
    });
    if (baseline != records.end()) {
      const std::string ab_file = out_path(cfg, "report_abnormalities.csv");
      std::ofstream out(ab_file);
      if (!out) throw ValidationError("cannot open for writing: " + ab_file);
      out << "# config_hash=" << hash << "\n";
      out << "scenario,duration_ms,prolonged,prwp,pathological_q_leads,fragmented_leads\n";
      for (const EcgRecord& rec : records) {
        const AbnormalityFlags flags = detect_abnormalities(rec, *baseline);
        out << rec.scenario << "," << fmt17(qrs_duration_ms(rec)) << ","
            << (flags.prolonged ? 1 : 0) << "," << (flags.poor_r_progression ? 1 : 0) << ",";
        bool first = true;
        for (int l = 0; l < 8; ++l)
          if (flags.pathological_q[l]) {
            out << (first ? "" : ";") << EcgRecord::lead_names[l];
            first = false;
          }
        out << ",";
        first = true;
        for (int l = 0; l < 8; ++l)
          if (flags.fragmented[l]) {
            out << (first ? "" : ";") << EcgRecord::lead_names[l];
            first = false;
          }
        out << "\n";
      }
      written.push_back(ab_file);
    }
  }
  return written;
}

}  // namespace cardiotwin
