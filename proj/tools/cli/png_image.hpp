#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace cepfield::cli {

struct HeatmapStyle {
  int cell = 16;  // pixels per lattice cell
  int gap = 12;
  int colorbar = 10;
};

/// Writes the grids side by side as an 8-bit RGB PNG. Each panel is colour
/// scaled to its own range and carries a colour bar underneath. NaN cells
/// are drawn grey.
void write_heatmaps(const std::filesystem::path& path, const std::vector<Eigen::MatrixXd>& panels,
                    const HeatmapStyle& style = {});

/// Perceptually ordered blue-white-red ramp, t in [0, 1].
std::array<unsigned char, 3> diverging(double t);

}  // namespace cepfield::cli
