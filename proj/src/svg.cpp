#include "twinbeam/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace twinbeam {

namespace {

struct Stop {
  double t, r, g, b;
};

// Dark blue through teal and green to yellow.
const Stop kRamp[] = {{0.00, 68, 1, 84},
                      {0.25, 59, 82, 139},
                      {0.50, 33, 145, 140},
                      {0.75, 94, 201, 98},
                      {1.00, 253, 231, 37}};

std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const Stop* a = &kRamp[0];
  const Stop* b = &kRamp[0];
  for (std::size_t i = 1; i < std::size(kRamp); ++i) {
    a = b;
    b = &kRamp[i];
    if (t <= b->t) break;
  }
  double u = b->t > a->t ? (t - a->t) / (b->t - a->t) : 0.0;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(a->r + u * (b->r - a->r))),
                static_cast<int>(std::lround(a->g + u * (b->g - a->g))),
                static_cast<int>(std::lround(a->b + u * (b->b - a->b))));
  return buf;
}

}  // namespace

std::string heatmap_svg(const Eigen::MatrixXd& values,
                        const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::string& title, const std::string& unit,
                        const std::string& provenance) {
  int rows = static_cast<int>(values.rows());
  int cols = static_cast<int>(values.cols());
  const int cell = 28, left = 70, top = 50, bottom = 40;
  int width = left + cols * cell + 20;
  int height = top + rows * cell + bottom;
  double vmin = values.minCoeff(), vmax = values.maxCoeff();
  double span = vmax > vmin ? vmax - vmin : 1.0;

  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  out += buf;
  out += "<!-- " + provenance + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" "
                "font-size=\"15\">%s</text>\n",
                left, title.c_str());
  out += buf;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double t = (values(r, c) - vmin) / span;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"%s\"><title>%.3f</title></rect>\n",
                    left + c * cell, top + r * cell, cell, cell,
                    color(t).c_str(), values(r, c));
      out += buf;
    }
    if (r < static_cast<int>(row_labels.size())) {
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" "
                    "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                    left - 6, top + r * cell + cell / 2 + 4,
                    row_labels[r].c_str());
      out += buf;
    }
  }
  for (int c = 0; c < cols && c < static_cast<int>(col_labels.size()); ++c) {
    if (c % 2) continue;  // thin out crowded azimuth labels
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"10\">%s</text>\n",
                  left + c * cell + cell / 2, top + rows * cell + 14,
                  col_labels[c].c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                "font-size=\"11\">min %.2f / max %.2f %s</text>\n",
                left, top + rows * cell + 32, vmin, vmax, unit.c_str());
  out += buf;
  out += "</svg>\n";
  return out;
}

std::string line_chart_svg(const std::vector<ChartSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::string& provenance) {
  const int w = 640, h = 420, left = 64, right = 24, top = 40, bottom = 52;
  const int pw = w - left - right, ph = h - top - bottom;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return left + pw * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                w, h, w, h);
  out = buf;
  out += "<!-- " + provenance + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"22\" font-family=\"sans-serif\" "
                "font-size=\"14\" font-weight=\"bold\">%s</text>\n",
                left, title.c_str());
  out += buf;

  for (int t = 0; t <= 4; ++t) {
    double xv = xmin + (xmax - xmin) * t / 4.0;
    double yv = ymin + (ymax - ymin) * t / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" "
                  "stroke=\"#ddd\"/>\n",
                  px(xv), top, px(xv), top + ph);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/>\n",
                  left, py(yv), left + pw, py(yv));
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n",
                  px(xv), top + ph + 16, xv);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n",
                  left - 6, py(yv) + 4, yv);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                "fill=\"none\" stroke=\"#333\"/>\n",
                left, top, pw, ph);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                left + pw / 2, h - 12, x_label.c_str());
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%d\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" font-size=\"11\" "
                "transform=\"rotate(-90 14 %d)\">%s</text>\n",
                top + ph / 2, top + ph / 2, y_label.c_str());
  out += buf;

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % 8];
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", i ? " " : "", px(s.x[i]),
                    py(s.y[i]));
      pts += buf;
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"2\"/>\n";
    if (s.x.size() <= 64) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.5\" fill=\"%s\"/>\n",
                      px(s.x[i]), py(s.y[i]), color);
        out += buf;
      }
    }
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"10\" height=\"10\" "
                  "fill=\"%s\"/><text x=\"%d\" y=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                  left + pw - 150, top + 8 + 16 * static_cast<int>(si), color,
                  left + pw - 136, top + 17 + 16 * static_cast<int>(si),
                  s.name.c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace twinbeam
