#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "twinbeam/array.hpp"
#include "twinbeam/geometry.hpp"

namespace twinbeam {

struct Box {
  Vec3 lo, hi;
  double rho = 0.3;  // amplitude reflection coefficient of all six faces
  std::string id;
};

// Axis-aligned rectangular reflector. axis is the normal direction,
// (au, av) the two in-plane axes.
struct Surface {
  int axis = 0;
  double plane = 0.0;
  Vec3 normal;
  int au = 1, av = 2;
  double ulo = 0, uhi = 0, vlo = 0, vhi = 0;
  double rho = 0.6;
  std::string id;
};

struct Scene {
  Vec3 room_lo, room_hi;
  // Wall reflection coefficients in order x-lo, x-hi, y-lo, y-hi, floor, ceiling.
  std::array<double, 6> wall_rho{};
  std::vector<Box> obstacles;

  UpaGeometry sta;
  std::vector<UpaGeometry> interferers;
  UpaGeometry relay_rx, relay_tx, ap;

  double carrier_hz = 60.48e9;
  double bandwidth_hz = 1.2e9;
  double p_sta_w = 0.1;
  double p_interferer_w = 0.1;
  double noise_w = 4.8e-11;
  double amplification = 1.0;

  // Region the mobile transmitters are drawn from (z is fixed: lo.z == hi.z).
  Vec3 tx_region_lo, tx_region_hi;

  // Node id pairs whose direct path is suppressed.
  std::vector<std::pair<std::string, std::string>> blocked_links;

  double wavelength() const { return 299792458.0 / carrier_hz; }
  std::vector<Surface> surfaces() const;
  const UpaGeometry& node(const std::string& id) const;
  bool link_blocked(const std::string& a, const std::string& b) const;
  void validate() const;  // throws on violated structural constraints
};

struct PropPath {
  std::vector<Vec3> vertices;  // tx endpoint, reflection points, rx endpoint
  int order = 0;
  std::complex<double> gain;
  double length = 0.0;
  Angles departure, arrival;  // world angles, both pointing away from the endpoint
  std::vector<std::string> surface_ids;
};

struct ChannelMatrix {
  CMat entries;
  std::string tx_node, rx_node;
};

// Specular paths from node a to node b with up to max_order reflections,
// found by mirror images across the room walls and obstacle faces.
// Obstacles occlude; blocked_links suppress the direct path only.
std::vector<PropPath> trace_paths(const Scene& scene, const std::string& a,
                                  const std::string& b, int max_order);

// Sum of rank-1 terms gain * a_rx * a_tx^H over the traced paths.
ChannelMatrix channel_matrix(const Scene& scene, const std::vector<PropPath>& paths,
                             const UpaGeometry& tx, const UpaGeometry& rx);

// Relay cascade rx_channel * phi * tx_channel with dimension checks.
ChannelMatrix cascaded_channel(const ChannelMatrix& h, const RelayPhaseMatrix& phi,
                               const ChannelMatrix& g);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
Scene make_default_scene();
std::string scene_hash(const Scene& scene);

// Jitter every reflection coefficient by a uniform factor in [1-frac, 1+frac],
// clamped to [0, 1]. Node placement and radio parameters are unchanged.
Scene perturb_materials(const Scene& scene, double frac, std::uint64_t seed);

double thermal_noise_w(double bandwidth_hz, double noise_figure_db);

}  // namespace twinbeam
