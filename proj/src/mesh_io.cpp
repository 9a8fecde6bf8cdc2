#include "cardiotwin/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace cardiotwin {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path);
  return in;
}

bool is_blank_or_comment(const std::string& line) {
  const std::size_t p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

// Data lines of the native formats, with comments and blanks skipped.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line))
    if (!is_blank_or_comment(line)) return true;
  return false;
}

// Parses exactly `n` whitespace-separated fields from one line.
template <typename T>
std::vector<T> parse_fields(const std::string& line, std::size_t n, const std::string& what) {
  std::istringstream ss(line);
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(ss >> out[i]))
      throw FormatError(what + ": expected " + std::to_string(n) + " fields, got \"" + line +
                        "\"");
  std::string extra;
  if (ss >> extra)
    throw FormatError(what + ": trailing fields in \"" + line + "\"");
  return out;
}

Mesh parse_native(std::istream& in) {
  Mesh mesh;
  bool have_nodes = false, have_tets = false, have_frames = false, have_cobiveco = false,
       have_tags = false;

  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream header(line);
    std::string section;
    long long count = -1;
    if (!(header >> section >> count) || count < 0)
      throw FormatError("mesh: malformed section header \"" + line + "\"");

    const auto data_line = [&](const std::string& what) {
      if (!next_data_line(in, line))
        throw FormatError("mesh: " + what + " section ends early");
      return line;
    };

    if (section == "nodes") {
      mesh.nodes.resize(count);
      for (long long i = 0; i < count; ++i) {
        const auto f = parse_fields<double>(data_line("nodes"), 3, "mesh node");
        mesh.nodes[i] = {f[0], f[1], f[2]};
      }
      have_nodes = true;
    } else if (section == "tets") {
      mesh.tets.resize(count);
      for (long long i = 0; i < count; ++i) {
        const auto f = parse_fields<int>(data_line("tets"), 4, "mesh tet");
        mesh.tets[i] = {f[0], f[1], f[2], f[3]};
      }
      have_tets = true;
    } else if (section == "frames") {
      mesh.frames.resize(count);
      for (long long i = 0; i < count; ++i) {
        const auto f = parse_fields<double>(data_line("frames"), 9, "mesh frame");
        mesh.frames[i] = {{f[0], f[1], f[2]}, {f[3], f[4], f[5]}, {f[6], f[7], f[8]}};
      }
      have_frames = true;
    } else if (section == "cobiveco") {
      mesh.cobiveco.resize(count);
      for (long long i = 0; i < count; ++i) {
        const auto f = parse_fields<double>(data_line("cobiveco"), 4, "mesh cobiveco");
        mesh.cobiveco[i] = {f[0], f[1], f[2], static_cast<int>(f[3])};
      }
      have_cobiveco = true;
    } else if (section == "surface_tags") {
      mesh.surface_tags.resize(count);
      for (long long i = 0; i < count; ++i) {
        const auto f = parse_fields<std::string>(data_line("surface_tags"), 1, "mesh tag");
        mesh.surface_tags[i] = surface_tag_from_string(f[0]);
      }
      have_tags = true;
    } else {
      throw FormatError("mesh: unknown section \"" + section + "\"");
    }
  }

  if (!have_nodes) throw FormatError("mesh: missing nodes section");
  if (!have_tets) throw FormatError("mesh: missing tets section");
  if (!have_frames) throw FormatError("mesh: missing frames section");
  if (!have_cobiveco) throw FormatError("mesh: missing cobiveco section");
  if (!have_tags) throw FormatError("mesh: missing surface_tags section");
  return mesh;
}

Mesh parse_legacy_vtk(std::istream& in) {
  // Header: version line (already known), title, ASCII, DATASET.
  std::string line, token;
  std::getline(in, line);  // title, free text
  if (!(in >> token) || token != "ASCII")
    throw FormatError("legacy mesh: only ASCII files are supported");
  if (!(in >> token) || token != "DATASET" || !(in >> token) || token != "UNSTRUCTURED_GRID")
    throw FormatError("legacy mesh: expected DATASET UNSTRUCTURED_GRID");

  Mesh mesh;
  std::map<std::string, std::vector<double>> point_data;
  long long n_points = -1;

  while (in >> token) {
    if (token == "POINTS") {
      std::string type;
      if (!(in >> n_points >> type) || n_points < 0)
        throw FormatError("legacy mesh: malformed POINTS header");
      mesh.nodes.resize(n_points);
      for (long long i = 0; i < n_points; ++i)
        if (!(in >> mesh.nodes[i].x >> mesh.nodes[i].y >> mesh.nodes[i].z))
          throw FormatError("legacy mesh: POINTS block ends early");
    } else if (token == "CELLS") {
      long long n_cells = 0, total = 0;
      if (!(in >> n_cells >> total))
        throw FormatError("legacy mesh: malformed CELLS header");
      mesh.tets.resize(n_cells);
      for (long long i = 0; i < n_cells; ++i) {
        int npts = 0;
        if (!(in >> npts)) throw FormatError("legacy mesh: CELLS block ends early");
        if (npts != 4)
          throw FormatError("legacy mesh: cell " + std::to_string(i) + " has " +
                            std::to_string(npts) + " points, tetrahedra required");
        for (int k = 0; k < 4; ++k)
          if (!(in >> mesh.tets[i][k]))
            throw FormatError("legacy mesh: CELLS block ends early");
      }
    } else if (token == "CELL_TYPES") {
      long long n_cells = 0;
      if (!(in >> n_cells)) throw FormatError("legacy mesh: malformed CELL_TYPES header");
      for (long long i = 0; i < n_cells; ++i) {
        int t = 0;
        if (!(in >> t)) throw FormatError("legacy mesh: CELL_TYPES block ends early");
        if (t != 10) throw FormatError("legacy mesh: only tetrahedral cells (type 10) accepted");
      }
    } else if (token == "POINT_DATA") {
      long long n = 0;
      if (!(in >> n) || n != n_points)
        throw FormatError("legacy mesh: POINT_DATA count does not match POINTS");
    } else if (token == "SCALARS") {
      std::string name, type;
      if (!(in >> name >> type)) throw FormatError("legacy mesh: malformed SCALARS header");
      int components = 1;
      // The component count is optional in the header line.
      std::string rest;
      std::getline(in, rest);
      std::istringstream rs(rest);
      rs >> components;
      if (components != 1)
        throw FormatError("legacy mesh: SCALARS " + name + " must have one component");
      if (!(in >> token) || token != "LOOKUP_TABLE" || !(in >> token))
        throw FormatError("legacy mesh: SCALARS " + name + " missing LOOKUP_TABLE line");
      std::vector<double>& arr = point_data[name];
      arr.resize(n_points);
      for (long long i = 0; i < n_points; ++i)
        if (!(in >> arr[i]))
          throw FormatError("legacy mesh: scalar array " + name + " ends early");
    } else {
      throw FormatError("legacy mesh: unsupported block \"" + token + "\"");
    }
  }

  if (n_points < 0) throw FormatError("legacy mesh: missing POINTS block");
  for (const char* required : {"tm", "ab", "rt", "tv"})
    if (!point_data.count(required))
      throw FormatError(std::string("legacy mesh: missing point-data array ") + required);

  mesh.cobiveco.resize(n_points);
  for (long long i = 0; i < n_points; ++i)
    mesh.cobiveco[i] = {point_data["tm"][i], point_data["ab"][i], point_data["rt"][i],
                        static_cast<int>(point_data["tv"][i])};

  mesh.surface_tags.assign(n_points, SurfaceTag::none);
  if (const auto it = point_data.find("surface_tag"); it != point_data.end())
    for (long long i = 0; i < n_points; ++i) {
      const int code = static_cast<int>(it->second[i]);
      if (code < 0 || code > 3)
        throw FormatError("legacy mesh: surface_tag code out of range");
      mesh.surface_tags[i] = static_cast<SurfaceTag>(code);
    }

  // No frame convention exists for the legacy format; use the global basis.
  mesh.frames.assign(mesh.tets.size(), Frame{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  return mesh;
}

}  // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# biventricular mesh, lengths in mm\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const Vec3& p : mesh.nodes)
    out << fmt17(p.x) << " " << fmt17(p.y) << " " << fmt17(p.z) << "\n";
  out << "tets " << mesh.tets.size() << "\n";
  for (const auto& t : mesh.tets)
    out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  out << "frames " << mesh.frames.size() << "\n";
  for (const Frame& f : mesh.frames) {
    out << fmt17(f.fiber.x) << " " << fmt17(f.fiber.y) << " " << fmt17(f.fiber.z) << " "
        << fmt17(f.sheet.x) << " " << fmt17(f.sheet.y) << " " << fmt17(f.sheet.z) << " "
        << fmt17(f.normal.x) << " " << fmt17(f.normal.y) << " " << fmt17(f.normal.z) << "\n";
  }
  out << "cobiveco " << mesh.cobiveco.size() << "\n";
  for (const CobivecoCoord& c : mesh.cobiveco)
    out << fmt17(c.tm) << " " << fmt17(c.ab) << " " << fmt17(c.rt) << " " << c.tv << "\n";
  out << "surface_tags " << mesh.surface_tags.size() << "\n";
  for (SurfaceTag t : mesh.surface_tags) out << to_string(t) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string first;
  if (!std::getline(in, first)) throw FormatError("mesh file is empty: " + path);

  Mesh mesh;
  if (first.rfind("# vtk DataFile", 0) == 0) {
    mesh = parse_legacy_vtk(in);
  } else {
    in.clear();
    in.seekg(0);
    mesh = parse_native(in);
  }
  validate_mesh(mesh);
  return mesh;
}

void save_activation_csv(const ActivationMap& atm, const std::string& path,
                         const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "node,t_ms\n";
  for (std::size_t i = 0; i < atm.t_ms.size(); ++i)
    out << i << "," << fmt17(atm.t_ms[i]) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

void save_labeling_csv(const TissueLabeling& labeling, const std::string& path,
                       const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "node,label\n";
  for (std::size_t i = 0; i < labeling.node_class.size(); ++i)
    out << i << "," << static_cast<int>(labeling.node_class[i]) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

TissueLabeling load_labeling_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  TissueLabeling lab;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    if (!header_seen) {
      if (line != "node,label") throw FormatError("labeling csv: bad header \"" + line + "\"");
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("labeling csv: bad row \"" + line + "\"");
    const std::size_t node = std::stoull(line.substr(0, comma));
    if (node != lab.node_class.size())
      throw FormatError("labeling csv: rows must be consecutive node indices");
    const std::string v = line.substr(comma + 1);
    if (v != "0" && v != "1" && v != "2")
      throw FormatError("labeling csv: label must be 0 (healthy), 1 (scar) or 2 (bz), got \"" + v + "\"");
    lab.node_class.push_back(static_cast<TissueClass>(std::stoi(v)));
  }
  if (!header_seen) throw FormatError("labeling csv: empty file " + path);
  return lab;
}

void save_ecg_csv(const EcgRecord& rec, const std::string& path,
                  const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "# scenario=" << rec.scenario << "\n";
  out << "# dt_effective_ms=" << fmt17(rec.dt_effective_ms) << "\n";
  out << "# qrs_onset=" << rec.qrs_onset << "\n";
  out << "# qrs_offset=" << rec.qrs_offset << "\n";
  out << "sample";
  for (const char* name : EcgRecord::lead_names) out << "," << name;
  out << "\n";
  for (int s = 0; s < rec.length(); ++s) {
    out << s;
    for (int l = 0; l < 8; ++l) out << "," << fmt17(rec.leads[l][s]);
    out << "\n";
  }
  if (!out) throw ValidationError("write failed: " + path);
}

EcgRecord load_ecg_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  EcgRecord rec;
  std::string line;
  bool header_seen = false;
  int expected_sample = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto keyval = [&](const std::string& key) -> std::string {
        const std::string prefix = "# " + key + "=";
        return line.rfind(prefix, 0) == 0 ? line.substr(prefix.size()) : std::string();
      };
      if (auto v = keyval("scenario"); !v.empty()) rec.scenario = v;
      if (auto v = keyval("dt_effective_ms"); !v.empty()) rec.dt_effective_ms = std::stod(v);
      if (auto v = keyval("qrs_onset"); !v.empty()) rec.qrs_onset = std::stoi(v);
      if (auto v = keyval("qrs_offset"); !v.empty()) rec.qrs_offset = std::stoi(v);
      continue;
    }
    if (!header_seen) {
      std::string expect = "sample";
      for (const char* name : EcgRecord::lead_names) expect += std::string(",") + name;
      if (line != expect) throw FormatError("ecg csv: bad header \"" + line + "\"");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',')) throw FormatError("ecg csv: bad row \"" + line + "\"");
    if (std::stoi(field) != expected_sample)
      throw FormatError("ecg csv: rows must be consecutive sample indices");
    ++expected_sample;
    for (int l = 0; l < 8; ++l) {
      if (!std::getline(ss, field, ','))
        throw FormatError("ecg csv: row with fewer than 8 leads: \"" + line + "\"");
      rec.leads[l].push_back(std::stod(field));
    }
    if (std::getline(ss, field, ','))
      throw FormatError("ecg csv: row with extra fields: \"" + line + "\"");
  }
  if (!header_seen || rec.length() == 0) throw FormatError("ecg csv: no samples in " + path);
  return rec;
}

void save_dtw_csv(const DtwTable& table, const std::string& path,
                  const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "# baseline_duration_ms=" << fmt17(table.baseline_duration_ms) << "\n";
  out << "scenario";
  for (const char* name : EcgRecord::lead_names) out << "," << name;
  out << ",dtw_max,dtw_avg,duration_ms,representative\n";
  for (int r = 0; r < table.rows(); ++r) {
    out << table.scenario[r];
    for (int l = 0; l < 8; ++l) out << "," << fmt17(table.lead_dtw[r][l]);
    out << "," << fmt17(table.dtw_max[r]) << "," << fmt17(table.dtw_avg[r]) << ","
        << fmt17(table.duration_ms[r]) << ",";
    bool first = true;
    for (int l = 0; l < 8; ++l)
      if (table.representative[r][l]) {
        if (!first) out << ";";
        out << EcgRecord::lead_names[l];
        first = false;
      }
    out << "\n";
  }
  if (!out) throw ValidationError("write failed: " + path);
}

DtwTable load_dtw_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  DtwTable table;
  std::string line;
  bool header_seen = false;

  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const std::size_t p = s.find(',', start);
      if (p == std::string::npos) {
        out.push_back(s.substr(start));
        break;
      }
      out.push_back(s.substr(start, p - start));
      start = p + 1;
    }
    return out;
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string prefix = "# baseline_duration_ms=";
      if (line.rfind(prefix, 0) == 0) table.baseline_duration_ms = std::stod(line.substr(prefix.size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = split(line);
    if (f.size() != 13) throw FormatError("dtw csv: bad row \"" + line + "\"");
    table.scenario.push_back(f[0]);
    std::array<double, 8> leads;
    for (int l = 0; l < 8; ++l) leads[l] = std::stod(f[1 + l]);
    table.lead_dtw.push_back(leads);
    table.dtw_max.push_back(std::stod(f[9]));
    table.dtw_avg.push_back(std::stod(f[10]));
    table.duration_ms.push_back(std::stod(f[11]));
    std::array<bool, 8> rep{};
    std::istringstream reps(f[12]);
    std::string name;
    while (std::getline(reps, name, ';')) {
      bool known = false;
      for (int l = 0; l < 8; ++l)
        if (name == EcgRecord::lead_names[l]) {
          rep[l] = true;
          known = true;
        }
      if (!known) throw FormatError("dtw csv: unknown representative lead \"" + name + "\"");
    }
    table.representative.push_back(rep);
  }
  if (!header_seen || table.rows() == 0) throw FormatError("dtw csv: no rows in " + path);
  return table;
}

std::string read_config_hash(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  const std::string prefix = "# config_hash=";
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    if (!line.empty() && line[0] != '#') break;
  }
  return "";
}

}  // namespace cardiotwin
