#include "cardiotwin/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace cardiotwin {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) throw ValidationError("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

Vec3 vec3_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw FormatError("config: " + where + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void get_vec3(const json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = vec3_of(j.at(key), key);
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void parse_phantom(const json& j, PhantomSpec& p) {
  check_keys(j,
             {"lv_outer", "lv_inner", "rv_outer", "rv_inner", "base_height", "edge_length",
              "helix_endo_deg", "helix_epi_deg"},
             "phantom");
  get_vec3(j, "lv_outer", p.lv_outer);
  get_vec3(j, "lv_inner", p.lv_inner);
  get_vec3(j, "rv_outer", p.rv_outer);
  get_vec3(j, "rv_inner", p.rv_inner);
  get_to(j, "base_height", p.base_height);
  get_to(j, "edge_length", p.edge_length);
  get_to(j, "helix_endo_deg", p.helix_endo_deg);
  get_to(j, "helix_epi_deg", p.helix_epi_deg);
}

void parse_cv(const json& j, CvConfig& cv) {
  check_keys(j,
             {"fiber", "sheet", "sheet_normal", "endo_dense", "endo_sparse", "scar_fraction",
              "bz_fraction", "endo_layer_tm"},
             "cv");
  get_to(j, "fiber", cv.fiber);
  get_to(j, "sheet", cv.sheet);
  get_to(j, "sheet_normal", cv.sheet_normal);
  get_to(j, "endo_dense", cv.endo_dense);
  get_to(j, "endo_sparse", cv.endo_sparse);
  get_to(j, "scar_fraction", cv.scar_fraction);
  get_to(j, "bz_fraction", cv.bz_fraction);
  get_to(j, "endo_layer_tm", cv.endo_layer_tm);
}

void parse_catalogue(const json& j, CatalogueConfig& c) {
  check_keys(j,
             {"transmural_r_tm", "subendocardial_r_tm", "bz_scale", "slow_scar_fraction",
              "slow_bz_fraction", "locations"},
             "catalogue");
  get_to(j, "transmural_r_tm", c.transmural_r_tm);
  get_to(j, "subendocardial_r_tm", c.subendocardial_r_tm);
  get_to(j, "bz_scale", c.bz_scale);
  get_to(j, "slow_scar_fraction", c.slow_scar_fraction);
  get_to(j, "slow_bz_fraction", c.slow_bz_fraction);
  if (j.contains("locations")) {
    c.locations.clear();
    for (const json& loc : j.at("locations")) {
      check_keys(loc, {"name", "ab0", "rt0", "r_ab", "r_rt"}, "catalogue location");
      CatalogueLocation l;
      loc.at("name").get_to(l.name);
      loc.at("ab0").get_to(l.ab0);
      loc.at("rt0").get_to(l.rt0);
      loc.at("r_ab").get_to(l.r_ab);
      loc.at("r_rt").get_to(l.r_rt);
      c.locations.push_back(l);
    }
  }
}

void parse_ecg(const json& j, EcgConfig& e) {
  check_keys(j,
             {"dt_ms", "upstroke_ms", "vm_rest_mv", "vm_plateau_mv", "lump_factor", "l_qrs",
              "onset_fraction"},
             "ecg");
  get_to(j, "dt_ms", e.dt_ms);
  get_to(j, "upstroke_ms", e.upstroke_ms);
  get_to(j, "vm_rest_mv", e.vm_rest_mv);
  get_to(j, "vm_plateau_mv", e.vm_plateau_mv);
  get_to(j, "lump_factor", e.lump_factor);
  get_to(j, "l_qrs", e.l_qrs);
  get_to(j, "onset_fraction", e.onset_fraction);
}

void parse_aha(const json& j, AhaConfig& a) {
  check_keys(j, {"apex_cap_ab", "apical_ab", "mid_ab", "anchor_rt"}, "aha");
  get_to(j, "apex_cap_ab", a.apex_cap_ab);
  get_to(j, "apical_ab", a.apical_ab);
  get_to(j, "mid_ab", a.mid_ab);
  get_to(j, "anchor_rt", a.anchor_rt);
}

void parse_inverse(const json& j, InverseConfig& ic) {
  check_keys(j, {"budget", "simplex_steps", "tol", "seed", "jobs"}, "inverse");
  get_to(j, "budget", ic.budget);
  if (j.contains("simplex_steps")) {
    const json& s = j.at("simplex_steps");
    if (!s.is_array() || s.size() != 5)
      throw FormatError("config: inverse.simplex_steps must have 5 entries");
    for (int i = 0; i < 5; ++i) ic.simplex_steps[i] = s[i].get<double>();
  }
  get_to(j, "tol", ic.tol);
  get_to(j, "seed", ic.seed);
  get_to(j, "jobs", ic.jobs);
}

void parse_roots(const json& j, std::vector<RootTarget>& roots) {
  roots.clear();
  for (const json& r : j) {
    check_keys(r, {"tm", "ab", "rt", "tv", "delay_ms"}, "root target");
    RootTarget t;
    r.at("tm").get_to(t.coord.tm);
    r.at("ab").get_to(t.coord.ab);
    r.at("rt").get_to(t.coord.rt);
    r.at("tv").get_to(t.coord.tv);
    get_to(r, "delay_ms", t.delay_ms);
    roots.push_back(t);
  }
}

void parse_electrodes(const json& j, ElectrodeSet& e) {
  check_keys(j, {"names", "positions"}, "electrodes");
  e.names.clear();
  e.positions.clear();
  if (j.contains("names")) j.at("names").get_to(e.names);
  if (j.contains("positions"))
    for (const json& p : j.at("positions")) e.positions.push_back(vec3_of(p, "electrode"));
  if (e.names.size() != e.positions.size())
    throw ValidationError("config: electrode names and positions differ in count");
}

}  // namespace

void RunConfig::validate() const {
  if (mesh_path.empty()) phantom.validate();
  cv.validate();
  ecg.validate();
  inverse.validate();
  if (jobs < 1) throw ValidationError("config: jobs must be >= 1");
  for (const RootTarget& t : root_targets) cardiotwin::validate(t.coord);
  if (electrodes.names.size() != electrodes.positions.size())
    throw ValidationError("config: electrode names and positions differ in count");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: top level must be an object");

  RunConfig cfg;
  try {
    check_keys(j,
               {"mesh", "phantom", "cv", "catalogue", "ecg", "aha", "inverse", "roots",
                "electrodes", "out_dir", "seed", "jobs"},
               "top level");
    get_to(j, "mesh", cfg.mesh_path);
    if (j.contains("phantom")) parse_phantom(j.at("phantom"), cfg.phantom);
    if (j.contains("cv")) parse_cv(j.at("cv"), cfg.cv);
    if (j.contains("catalogue")) parse_catalogue(j.at("catalogue"), cfg.catalogue);
    if (j.contains("ecg")) parse_ecg(j.at("ecg"), cfg.ecg);
    if (j.contains("aha")) parse_aha(j.at("aha"), cfg.aha);
    if (j.contains("inverse")) parse_inverse(j.at("inverse"), cfg.inverse);
    if (j.contains("roots")) parse_roots(j.at("roots"), cfg.root_targets);
    if (j.contains("electrodes")) parse_electrodes(j.at("electrodes"), cfg.electrodes);
    get_to(j, "out_dir", cfg.out_dir);
    get_to(j, "seed", cfg.seed);
    get_to(j, "jobs", cfg.jobs);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

namespace {

json effective_config_json(const RunConfig& cfg) {
  json j;
  j["mesh"] = cfg.mesh_path;
  j["phantom"] = {{"lv_outer", vec3_json(cfg.phantom.lv_outer)},
                  {"lv_inner", vec3_json(cfg.phantom.lv_inner)},
                  {"rv_outer", vec3_json(cfg.phantom.rv_outer)},
                  {"rv_inner", vec3_json(cfg.phantom.rv_inner)},
                  {"base_height", cfg.phantom.base_height},
                  {"edge_length", cfg.phantom.edge_length},
                  {"helix_endo_deg", cfg.phantom.helix_endo_deg},
                  {"helix_epi_deg", cfg.phantom.helix_epi_deg}};
  j["cv"] = {{"fiber", cfg.cv.fiber},
             {"sheet", cfg.cv.sheet},
             {"sheet_normal", cfg.cv.sheet_normal},
             {"endo_dense", cfg.cv.endo_dense},
             {"endo_sparse", cfg.cv.endo_sparse},
             {"scar_fraction", cfg.cv.scar_fraction},
             {"bz_fraction", cfg.cv.bz_fraction},
             {"endo_layer_tm", cfg.cv.endo_layer_tm}};
  json locations = json::array();
  for (const CatalogueLocation& l :
       cfg.catalogue.locations.empty() ? default_catalogue_locations() : cfg.catalogue.locations)
    locations.push_back({{"name", l.name},
                         {"ab0", l.ab0},
                         {"rt0", l.rt0},
                         {"r_ab", l.r_ab},
                         {"r_rt", l.r_rt}});
  j["catalogue"] = {{"transmural_r_tm", cfg.catalogue.transmural_r_tm},
                    {"subendocardial_r_tm", cfg.catalogue.subendocardial_r_tm},
                    {"bz_scale", cfg.catalogue.bz_scale},
                    {"slow_scar_fraction", cfg.catalogue.slow_scar_fraction},
                    {"slow_bz_fraction", cfg.catalogue.slow_bz_fraction},
                    {"locations", locations}};
  j["ecg"] = {{"dt_ms", cfg.ecg.dt_ms},
              {"upstroke_ms", cfg.ecg.upstroke_ms},
              {"vm_rest_mv", cfg.ecg.vm_rest_mv},
              {"vm_plateau_mv", cfg.ecg.vm_plateau_mv},
              {"lump_factor", cfg.ecg.lump_factor},
              {"l_qrs", cfg.ecg.l_qrs},
              {"onset_fraction", cfg.ecg.onset_fraction}};
  j["aha"] = {{"apex_cap_ab", cfg.aha.apex_cap_ab},
              {"apical_ab", cfg.aha.apical_ab},
              {"mid_ab", cfg.aha.mid_ab},
              {"anchor_rt", cfg.aha.anchor_rt}};
  j["inverse"] = {{"budget", cfg.inverse.budget},
                  {"simplex_steps", cfg.inverse.simplex_steps},
                  {"tol", cfg.inverse.tol},
                  {"seed", cfg.inverse.seed},
                  {"jobs", cfg.inverse.jobs}};
  json roots = json::array();
  for (const RootTarget& t : cfg.root_targets)
    roots.push_back({{"tm", t.coord.tm},
                     {"ab", t.coord.ab},
                     {"rt", t.coord.rt},
                     {"tv", t.coord.tv},
                     {"delay_ms", t.delay_ms}});
  j["roots"] = roots;
  json positions = json::array();
  for (const Vec3& p : cfg.electrodes.positions) positions.push_back(vec3_json(p));
  j["electrodes"] = {{"names", cfg.electrodes.names}, {"positions", positions}};
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  return effective_config_json(cfg).dump(2);
}

std::string config_hash(const RunConfig& cfg) {
  // Storage location and worker counts do not change any result, so they do
  // not participate in the experiment identity.
  json j = effective_config_json(cfg);
  j.erase("out_dir");
  j.erase("jobs");
  j["inverse"].erase("jobs");
  const std::string text = j.dump(2);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cardiotwin
