#pragma once

#include <vector>

#include "twinbeam/geometry.hpp"

namespace twinbeam {

// Quantized beam grid, stored as scan angles in radians. Entries are
// elevation-major in the listed elevation order, azimuth ascending within
// each row.
struct Codebook {
  std::vector<Angles> entries;
  std::vector<double> azimuths;    // radians, ascending
  std::vector<double> elevations;  // radians, listing order
  int m() const { return static_cast<int>(elevations.size()); }
  int n_az() const { return static_cast<int>(azimuths.size()); }
  int size() const { return static_cast<int>(entries.size()); }
};

// Arguments in degrees; the azimuth count is round((max-min)/step)+1 and the
// grid is spaced exactly evenly so mid values land on clean numbers.
Codebook build_codebook(double az_min_deg, double az_max_deg, double az_step_deg,
                        const std::vector<double>& elevations_deg);

// 21 azimuths from -54 to 54 by 5.4 degrees, elevations +18, 0, -18.
Codebook default_codebook();

// Deterministic measurement subset: fill the 0-degree elevation row first
// with azimuths spread evenly across the row (endpoints included), overflow
// to the +18 row, then the -18 row. Within the fill order azimuths ascend.
std::vector<Angles> beam_subset(const Codebook& cb, int s);

}  // namespace twinbeam
