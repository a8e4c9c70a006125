#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace twinbeam {

// Standalone SVG color grid. Rows render top to bottom, columns left to
// right; cell values are mapped onto a fixed blue-to-yellow ramp between the
// matrix min and max. provenance is emitted as an XML comment.
std::string heatmap_svg(const Eigen::MatrixXd& values,
                        const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::string& title, const std::string& unit,
                        const std::string& provenance);

// Standalone SVG line chart, one polyline per series. Axis ranges cover the
// combined data with a small pad. provenance is emitted as an XML comment.
struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart_svg(const std::vector<ChartSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::string& provenance);

}  // namespace twinbeam
