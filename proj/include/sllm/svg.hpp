#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "sllm/pca.hpp"
#include "sllm/text.hpp"

namespace sllm {

// Coloring for the scatter: discrete classes (at most 20) or a continuous
// value ramp.
struct ScatterLabels {
  enum class Kind { kClass, kValue } kind = Kind::kClass;
  std::vector<int> classes;
  Vec values;
  std::size_t n_classes = 0;
};

namespace detail {

inline const char* kPalette[20] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
    "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};

inline std::string ramp_color(double t) {
  // blue -> red
  const int r0 = 0x21, g0 = 0x66, b0 = 0xac;
  const int r1 = 0xb2, g1 = 0x18, b1 = 0x2b;
  const auto mix = [&](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", mix(r0, r1), mix(g0, g1), mix(b0, b1));
  return buf;
}

inline std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail

// Static SVG 1.1 scatter of a 2-D projection, one circle per user, colored
// by class or value, with a legend. Output bytes are a pure function of the
// input.
inline std::string render_scatter_svg(const Projection2D& proj, const ScatterLabels& labels) {
  const std::size_t n = proj.coords.rows();
  if (labels.kind == ScatterLabels::Kind::kClass) {
    if (labels.classes.size() != n)
      throw ShapeError("emit_scatter: " + std::to_string(labels.classes.size()) +
                       " class labels for " + std::to_string(n) + " points");
    if (labels.n_classes > 20)
      throw Error("emit_scatter: at most 20 classes supported, got " +
                  std::to_string(labels.n_classes));
  } else if (labels.values.size() != n) {
    throw ShapeError("emit_scatter: " + std::to_string(labels.values.size()) + " values for " +
                     std::to_string(n) + " points");
  }

  const double width = 720, height = 520, margin = 50;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         detail::f3(width) + "\" height=\"" + detail::f3(height) + "\" viewBox=\"0 0 " +
         detail::f3(width) + " " + detail::f3(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (n > 0) {
    double xmin = proj.coords(0, 0), xmax = xmin, ymin = proj.coords(0, 1), ymax = ymin;
    for (std::size_t i = 0; i < n; ++i) {
      xmin = std::min(xmin, proj.coords(i, 0));
      xmax = std::max(xmax, proj.coords(i, 0));
      ymin = std::min(ymin, proj.coords(i, 1));
      ymax = std::max(ymax, proj.coords(i, 1));
    }
    const double xspan = xmax - xmin, yspan = ymax - ymin;
    const double plot_w = width - 2 * margin - 140;  // room for the legend
    const double plot_h = height - 2 * margin;
    auto sx = [&](double x) {
      return xspan == 0.0 ? margin + plot_w / 2 : margin + (x - xmin) / xspan * plot_w;
    };
    auto sy = [&](double y) {
      return yspan == 0.0 ? margin + plot_h / 2 : margin + plot_h - (y - ymin) / yspan * plot_h;
    };

    double vmin = 0.0, vmax = 0.0;
    if (labels.kind == ScatterLabels::Kind::kValue && n > 0) {
      vmin = *std::min_element(labels.values.begin(), labels.values.end());
      vmax = *std::max_element(labels.values.begin(), labels.values.end());
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::string color;
      if (labels.kind == ScatterLabels::Kind::kClass) {
        color = detail::kPalette[static_cast<std::size_t>(labels.classes[i]) % 20];
      } else {
        const double t = vmax == vmin ? 0.5 : (labels.values[i] - vmin) / (vmax - vmin);
        color = detail::ramp_color(t);
      }
      svg += "<circle cx=\"" + detail::f3(sx(proj.coords(i, 0))) + "\" cy=\"" +
             detail::f3(sy(proj.coords(i, 1))) + "\" r=\"2.5\" fill=\"" + color +
             "\" fill-opacity=\"0.75\"/>\n";
    }

    // Legend.
    const double lx = width - margin - 120;
    double ly = margin;
    svg += "<text x=\"" + detail::f3(lx) + "\" y=\"" + detail::f3(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">legend</text>\n";
    ly += 8;
    if (labels.kind == ScatterLabels::Kind::kClass) {
      for (std::size_t c = 0; c < labels.n_classes; ++c) {
        ly += 18;
        svg += "<rect x=\"" + detail::f3(lx) + "\" y=\"" + detail::f3(ly - 10) +
               "\" width=\"12\" height=\"12\" fill=\"" + std::string(detail::kPalette[c % 20]) +
               "\"/>\n";
        svg += "<text x=\"" + detail::f3(lx + 18) + "\" y=\"" + detail::f3(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">class " + std::to_string(c) +
               "</text>\n";
      }
    } else {
      for (int k = 0; k < 2; ++k) {
        ly += 18;
        const double v = k == 0 ? vmin : vmax;
        svg += "<rect x=\"" + detail::f3(lx) + "\" y=\"" + detail::f3(ly - 10) +
               "\" width=\"12\" height=\"12\" fill=\"" + detail::ramp_color(k == 0 ? 0.0 : 1.0) +
               "\"/>\n";
        svg += "<text x=\"" + detail::f3(lx + 18) + "\" y=\"" + detail::f3(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + (k == 0 ? "min " : "max ") +
               detail::f3(v) + "</text>\n";
      }
    }
    svg += "<text x=\"" + detail::f3(margin) + "\" y=\"" + detail::f3(height - margin / 2) +
           "\" font-family=\"sans-serif\" font-size=\"11\">explained variance: " +
           detail::f3(proj.explained_variance[0]) + ", " + detail::f3(proj.explained_variance[1]) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_scatter(const Projection2D& proj, const ScatterLabels& labels,
                         const std::filesystem::path& path) {
  write_file_atomic(path, render_scatter_svg(proj, labels));
}

}  // namespace sllm
