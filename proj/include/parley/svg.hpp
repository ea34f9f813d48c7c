#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace parley {

// Plain self-contained SVG renderings of already-written CSV data. NaN values
// leave gaps.
std::string svg_line_chart(
    const std::string& title, const std::vector<std::string>& x_labels,
    const std::vector<std::pair<std::string, std::vector<double>>>& series);

std::string svg_bar_chart(const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& values);

// Levels drive the fill (1 light green .. 4 red, 0 grey); similarities are
// printed in the cells.
std::string svg_heatmap_grid(const std::string& title,
                             const std::vector<std::string>& labels,
                             const Eigen::MatrixXd& sims,
                             const Eigen::MatrixXi& levels);

}  // namespace parley
