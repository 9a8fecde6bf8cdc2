#include "cardiotwin/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cardiotwin {

namespace {

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Dark-blue to yellow ramp on t in [0,1].
std::string heat_color(double t) {
  t = clamp01(t);
  const double stops[5][3] = {{68, 1, 84},     {59, 82, 139},   {33, 145, 140},
                              {94, 201, 98},   {253, 231, 37}};
  const double x = t * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  char buf[32];
  std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)",
                static_cast<int>(std::lround(lerp(stops[i][0], stops[i + 1][0], f))),
                static_cast<int>(std::lround(lerp(stops[i][1], stops[i + 1][1], f))),
                static_cast<int>(std::lround(lerp(stops[i][2], stops[i + 1][2], f))));
  return buf;
}

std::ofstream open_svg(const std::string& path, int width, int height,
                       const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  out << "<!-- config_hash=" << config_hash << " -->\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  return out;
}

}  // namespace

void save_dtw_heatmap_svg(const DtwTable& table, const std::string& path,
                          const std::string& config_hash) {
  const int rows = table.rows();
  if (rows == 0) throw ValidationError("heatmap: empty table");

  const int cell = 26, label_w = 240, header_h = 40;
  const int cols = 10;  // 8 leads + max + avg
  const int width = label_w + cols * cell + 130;
  const int height = header_h + rows * cell + 20;

  double vmax = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (double v : table.lead_dtw[r]) vmax = std::max(vmax, v);
    vmax = std::max({vmax, table.dtw_max[r], table.dtw_avg[r]});
  }
  if (vmax <= 0.0) vmax = 1.0;

  std::ofstream out = open_svg(path, width, height, config_hash);

  const auto col_label = [&](int cidx) -> std::string {
    if (cidx < 8) return EcgRecord::lead_names[cidx];
    return cidx == 8 ? "max" : "avg";
  };
  for (int c = 0; c < cols; ++c)
    out << "<text x=\"" << label_w + c * cell + cell / 2 << "\" y=\"" << header_h - 8
        << "\" text-anchor=\"middle\">" << col_label(c) << "</text>\n";

  for (int r = 0; r < rows; ++r) {
    const int y = header_h + r * cell;
    out << "<text x=\"" << label_w - 6 << "\" y=\"" << y + cell / 2 + 4
        << "\" text-anchor=\"end\">" << table.scenario[r] << "</text>\n";
    for (int c = 0; c < cols; ++c) {
      const double v = c < 8    ? table.lead_dtw[r][c]
                       : c == 8 ? table.dtw_max[r]
                                : table.dtw_avg[r];
      out << "<rect x=\"" << label_w + c * cell << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << heat_color(v / vmax) << "\"";
      if (c < 8 && table.representative[r][c])
        out << " stroke=\"red\" stroke-width=\"2\"";
      out << "/>\n";
    }
    out << "<text x=\"" << label_w + cols * cell + 8 << "\" y=\"" << y + cell / 2 + 4
        << "\">" << fmt1(table.duration_ms[r]) << " ms</text>\n";
  }

  out << "<text x=\"" << label_w << "\" y=\"" << height - 6 << "\">scale max "
      << fmt3(vmax) << ", red outline = representative lead, baseline "
      << fmt1(table.baseline_duration_ms) << " ms</text>\n";
  out << "</svg>\n";
  if (!out) throw ValidationError("write failed: " + path);
}

void save_lead_traces_svg(const std::vector<EcgRecord>& records, const std::string& path,
                          const std::string& config_hash) {
  if (records.empty()) throw ValidationError("lead traces: no records");
  static const char* palette[6] = {"#000000", "#d62728", "#1f77b4",
                                   "#2ca02c", "#9467bd", "#ff7f0e"};

  const int panel_w = 460, panel_h = 90, margin = 40, legend_h = 18;
  const int width = panel_w + 2 * margin;
  const int height = margin + 8 * panel_h + static_cast<int>(records.size()) * legend_h + 30;

  std::ofstream out = open_svg(path, width, height, config_hash);

  for (int l = 0; l < 8; ++l) {
    const int top = margin + l * panel_h;
    out << "<text x=\"" << margin - 30 << "\" y=\"" << top + panel_h / 2 << "\">"
        << EcgRecord::lead_names[l] << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << top + panel_h / 2 << "\" x2=\""
        << margin + panel_w << "\" y2=\"" << top + panel_h / 2
        << "\" stroke=\"#cccccc\"/>\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
      const std::vector<double>& s = records[r].leads[l];
      if (s.empty()) continue;
      out << "<polyline fill=\"none\" stroke=\"" << palette[r % 6]
          << "\" stroke-width=\"1\" points=\"";
      const int n = static_cast<int>(s.size());
      for (int i = 0; i < n; ++i) {
        const double x = margin + panel_w * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
        const double y = top + panel_h / 2 - s[i] * (panel_h * 0.45);
        out << fmt1(x) << "," << fmt1(y) << " ";
      }
      out << "\"/>\n";
    }
  }

  const int legend_top = margin + 8 * panel_h + 12;
  for (std::size_t r = 0; r < records.size(); ++r)
    out << "<text x=\"" << margin << "\" y=\"" << legend_top + r * legend_h << "\" fill=\""
        << palette[r % 6] << "\">" << records[r].scenario << " ("
        << fmt1(records[r].dt_effective_ms * (records[r].qrs_offset - records[r].qrs_onset))
        << " ms)</text>\n";
  out << "</svg>\n";
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace cardiotwin
