#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "stripes/boundaries.hpp"
#include "stripes/oracle/klausmeier_scan.hpp"

namespace stripes::io {

// 12-significant-digit decimal; identical bytes across runs and platforms
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

// CSV grid: header + one row per cell, row-major (y outer, x inner), LF only.
inline std::string render_grid_csv(const DiagramGrid& g) {
  std::string out = "x,y,exists,zigzag,eckhaus,square,hex,quasihex,stable\n";
  for (std::size_t iy = 0; iy < g.y.size(); ++iy)
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      const RegionLabel& r = g.at(ix, iy);
      out += fmt12(g.x[ix]);
      out += ',';
      out += fmt12(g.y[iy]);
      out += ',';
      out += r.exists ? '1' : '0';
      out += ',';
      out += r.zigzag_unstable ? '1' : '0';
      out += ',';
      out += r.eckhaus_unstable ? '1' : '0';
      out += ',';
      out += r.square_unstable ? '1' : '0';
      out += ',';
      out += r.hex_unstable ? '1' : '0';
      out += ',';
      out += r.quasihex_unstable ? '1' : '0';
      out += ',';
      out += r.stable_all_checked ? '1' : '0';
      out += '\n';
    }
  return out;
}

inline void emit_grid(const DiagramGrid& g, const std::string& path) {
  write_file(path, render_grid_csv(g));
}

// Scan output in the same CSV schema: square column carries the
// rectangle-breakup flag, quasihex the rhomb-breakup flag, hex the exact
// hexagonal lattice point.
inline DiagramGrid scan_to_grid(const oracle::KlausmeierScanResult& res) {
  DiagramGrid g;
  g.plane = DiagramPlane::kappa_alpha;
  g.x = res.kappa_values;
  g.y = res.a_values;
  g.labels.resize(g.x.size() * g.y.size());
  for (std::size_t iy = 0; iy < g.y.size(); ++iy)
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      const oracle::CellResult& c = res.at(ix, iy);
      RegionLabel& r = g.labels[iy * g.x.size() + ix];
      r.exists = c.exists;
      r.zigzag_unstable = c.zigzag;
      r.eckhaus_unstable = c.eckhaus;
      r.square_unstable = c.rect_breakup;
      r.hex_unstable = c.hex_point;
      r.quasihex_unstable = c.rhomb_breakup;
      r.stable_all_checked = c.exists && !c.zigzag && !c.eckhaus && !c.rect_breakup &&
                             !c.rhomb_breakup && !c.hex_point;
    }
  return g;
}

// line-delimited per-cell diagnostics
inline std::string render_scan_log(const oracle::KlausmeierScanResult& res) {
  std::string out =
      "# cell_index kappa a exists failed residual N max_re_rect max_re_rhomb amplitude\n";
  for (std::size_t iy = 0; iy < res.a_values.size(); ++iy)
    for (std::size_t ix = 0; ix < res.kappa_values.size(); ++ix) {
      const oracle::CellResult& c = res.at(ix, iy);
      out += std::to_string(iy * res.kappa_values.size() + ix);
      out += ' ';
      out += fmt12(res.kappa_values[ix]);
      out += ' ';
      out += fmt12(res.a_values[iy]);
      out += ' ';
      out += c.exists ? '1' : '0';
      out += ' ';
      out += c.solver_failed ? '1' : '0';
      out += ' ';
      out += fmt12(c.residual);
      out += ' ';
      out += std::to_string(res.config.N);
      out += ' ';
      out += fmt12(c.max_re_rect);
      out += ' ';
      out += fmt12(c.max_re_rhomb);
      out += ' ';
      out += fmt12(c.amplitude);
      out += '\n';
    }
  return out;
}

// Static SVG rendering: one layer (group) per instability flag, boundary
// polylines as paths, embedded legend, no external assets.
inline std::string render_plot_svg(const DiagramGrid& g,
                                   const std::vector<BoundaryCurve>& boundaries) {
  const double W = 720.0, H = 540.0, ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
  if (g.x.empty() || g.y.empty()) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
  const double x0 = g.x.front(), x1 = g.x.back(), y0 = g.y.front(), y1 = g.y.back();
  const double sx = (W - ml - mr) / (x1 > x0 ? x1 - x0 : 1.0);
  const double sy = (H - mt - mb) / (y1 > y0 ? y1 - y0 : 1.0);
  auto px = [&](double x) { return ml + (x - x0) * sx; };
  auto py = [&](double y) { return H - mb - (y - y0) * sy; };
  const double cw = g.x.size() > 1 ? (g.x[1] - g.x[0]) * sx : 4.0;
  const double ch = g.y.size() > 1 ? (g.y[1] - g.y[0]) * sy : 4.0;

  struct Layer {
    const char* name;
    const char* color;
    bool RegionLabel::*flag;
  };
  const Layer layers[] = {
      {"no-stripe", "#3b4cc0", nullptr},  // complement of exists, handled below
      {"quasihex", "#f2a0c0", &RegionLabel::quasihex_unstable},
      {"hex", "#d62728", &RegionLabel::hex_unstable},
      {"square", "#9aa0a6", &RegionLabel::square_unstable},
      {"eckhaus", "#2ca02c", &RegionLabel::eckhaus_unstable},
      {"zigzag", "#ff7f0e", &RegionLabel::zigzag_unstable},
  };
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt12(W) + "\" height=\"" +
         fmt12(H) + "\" viewBox=\"0 0 " + fmt12(W) + " " + fmt12(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Layer& layer : layers) {
    svg += "<g id=\"" + std::string(layer.name) + "\" fill=\"" + layer.color +
           "\" fill-opacity=\"0.55\">\n";
    for (std::size_t iy = 0; iy < g.y.size(); ++iy)
      for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
        const RegionLabel& r = g.at(ix, iy);
        const bool on = layer.flag == nullptr ? !r.exists : (r.exists && r.*(layer.flag));
        if (!on) continue;
        svg += "<rect x=\"" + fmt12(px(g.x[ix]) - 0.5 * cw) + "\" y=\"" +
               fmt12(py(g.y[iy]) - 0.5 * ch) + "\" width=\"" + fmt12(cw) + "\" height=\"" +
               fmt12(ch) + "\"/>\n";
      }
    svg += "</g>\n";
  }
  const char* curve_colors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#d62728",
                                "#8c564b", "#e377c2", "#17becf", "#bcbd22"};
  int ci = 0;
  for (const BoundaryCurve& b : boundaries) {
    if (b.x.empty()) continue;
    svg += "<path id=\"curve-" + b.name + "\" fill=\"none\" stroke=\"" +
           curve_colors[ci % 8] + "\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      svg += (i == 0 ? "M" : "L");
      svg += fmt12(px(b.x[i])) + " " + fmt12(py(b.y[i])) + " ";
    }
    svg += "\"/>\n";
    ++ci;
  }
  // axes + legend
  svg += "<rect x=\"" + fmt12(ml) + "\" y=\"" + fmt12(mt) + "\" width=\"" + fmt12(W - ml - mr) +
         "\" height=\"" + fmt12(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
  double ly = mt + 14.0;
  for (const Layer& layer : layers) {
    svg += "<rect x=\"" + fmt12(W - mr - 130.0) + "\" y=\"" + fmt12(ly - 9.0) +
           "\" width=\"12\" height=\"12\" fill=\"" + layer.color + "\" fill-opacity=\"0.55\"/>\n";
    svg += "<text x=\"" + fmt12(W - mr - 112.0) + "\" y=\"" + fmt12(ly + 1.0) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + layer.name + "</text>\n";
    ly += 16.0;
  }
  int ci2 = 0;
  for (const BoundaryCurve& b : boundaries) {
    if (b.x.empty()) continue;
    svg += "<text x=\"" + fmt12(W - mr - 130.0) + "\" y=\"" + fmt12(ly + 1.0) +
           "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" + curve_colors[ci2 % 8] +
           "\">" + b.name + "</text>\n";
    ly += 14.0;
    ++ci2;
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const DiagramGrid& g, const std::vector<BoundaryCurve>& boundaries,
                      const std::string& path) {
  write_file(path, render_plot_svg(g, boundaries));
}

}  // namespace stripes::io
