#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twinbeam/measurement.hpp"
#include "twinbeam/scene.hpp"

namespace twinbeam {

// Supervised samples: rows of beam-sweep SINR (dB) paired with the flat
// transmitter position vector [p0, p1, ..., pK] in meters.
struct Dataset {
  Eigen::MatrixXd x;  // n x s
  Eigen::MatrixXd y;  // n x 3*(k+1)
  int s = 0;
  int k = 1;
  std::uint64_t seed = 0;
  std::string scene_id;
  std::vector<int> group;  // location group per row; empty when ungrouped

  int n() const { return static_cast<int>(x.rows()); }
};

// Noiseless sweeps of the S-beam measurement subset at positions drawn
// uniformly from the scene's transmitter region. Position draws do not
// depend on S, so datasets for different S share positions seed-for-seed.
Dataset gen_dataset(const Scene& tmpl, int n, int s, std::uint64_t seed);

// Repeated noisy sweeps at fixed positions, one group per position. The
// interferer stays at the scene's configured spot. Used as the stand-in for
// measured training data.
Dataset gen_location_dataset(const Scene& scene, const std::vector<Vec3>& positions,
                             int sweeps_per_position, int s, double noise_sigma_db,
                             std::uint64_t seed);

// Default measured-data layout: two parallel rows of 15 spots 0.1 m apart.
std::vector<Vec3> default_measurement_positions();

void save_dataset(const Dataset& ds, const std::string& csv_path);
Dataset load_dataset(const std::string& csv_path);

}  // namespace twinbeam
