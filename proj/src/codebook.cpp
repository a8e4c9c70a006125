#include "twinbeam/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinbeam {

Codebook build_codebook(double az_min_deg, double az_max_deg, double az_step_deg,
                        const std::vector<double>& elevations_deg) {
  if (az_step_deg <= 0.0 || az_max_deg <= az_min_deg || elevations_deg.empty())
    throw std::invalid_argument("build_codebook: empty grid");
  int count = static_cast<int>(std::lround((az_max_deg - az_min_deg) / az_step_deg)) + 1;
  if (count < 1) throw std::invalid_argument("build_codebook: empty grid");
  Codebook cb;
  for (int k = 0; k < count; ++k) {
    double deg = count == 1
                     ? az_min_deg
                     : az_min_deg + (az_max_deg - az_min_deg) * k / (count - 1);
    cb.azimuths.push_back(deg2rad(deg));
  }
  for (double e : elevations_deg) cb.elevations.push_back(deg2rad(e));
  for (double el : cb.elevations)
    for (double az : cb.azimuths) cb.entries.push_back({az, el});
  return cb;
}

Codebook default_codebook() {
  return build_codebook(-54.0, 54.0, 5.4, {18.0, 0.0, -18.0});
}

std::vector<Angles> beam_subset(const Codebook& cb, int s) {
  if (s < 1 || s > cb.size())
    throw std::out_of_range("beam_subset: S outside 1..codebook size");
  int n_az = cb.n_az();

  // Row fill order: elevation 0 first, then the remaining elevations in
  // listing order.
  std::vector<double> row_order;
  for (double e : cb.elevations)
    if (e == 0.0) row_order.push_back(e);
  for (double e : cb.elevations)
    if (e != 0.0) row_order.push_back(e);

  // Evenly spread n picks over the row; a single pick takes the middle.
  auto row_indices = [n_az](int n) {
    std::vector<int> idx;
    if (n == 1) {
      idx.push_back((n_az - 1) / 2);
      return idx;
    }
    for (int i = 0; i < n; ++i)
      idx.push_back(static_cast<int>(std::lround(
          static_cast<double>(i) * (n_az - 1) / (n - 1))));
    return idx;
  };

  std::vector<Angles> out;
  int remaining = s;
  for (double el : row_order) {
    if (remaining <= 0) break;
    int take = std::min(remaining, n_az);
    for (int i : row_indices(take)) out.push_back({cb.azimuths[i], el});
    remaining -= take;
  }
  return out;
}

}  // namespace twinbeam
