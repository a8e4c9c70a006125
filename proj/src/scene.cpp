#include "twinbeam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "twinbeam/rng.hpp"

namespace twinbeam {

namespace {

constexpr double kOcclusionShrink = 1e-7;  // m, keeps surface-touching segments clear
constexpr double kRectTol = 1e-9;          // m, reflection-point containment slack

// Six faces of an axis-aligned box. Normals face outward when outward=true.
void box_surfaces(const Vec3& lo, const Vec3& hi, bool outward, double rho,
                  const std::string& id_prefix, std::vector<Surface>* out) {
  static const char* kSide[6] = {"xlo", "xhi", "ylo", "yhi", "zlo", "zhi"};
  for (int axis = 0; axis < 3; ++axis) {
    int au = (axis + 1) % 3, av = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      Surface s;
      s.axis = axis;
      s.plane = side ? hi[axis] : lo[axis];
      double sign = side ? 1.0 : -1.0;
      if (!outward) sign = -sign;
      s.normal = Vec3::Zero();
      s.normal[axis] = sign;
      s.au = au;
      s.av = av;
      s.ulo = lo[au];
      s.uhi = hi[au];
      s.vlo = lo[av];
      s.vhi = hi[av];
      s.rho = rho;
      s.id = id_prefix + kSide[axis * 2 + side];
      out->push_back(s);
    }
  }
}

bool segment_hits_box(const Vec3& p0, const Vec3& p1, const Box& b) {
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    double lo = b.lo[i] + kOcclusionShrink;
    double hi = b.hi[i] - kOcclusionShrink;
    if (lo >= hi) return false;
    double d = p1[i] - p0[i];
    if (std::abs(d) < 1e-15) {
      if (p0[i] < lo || p0[i] > hi) return false;
    } else {
      double ta = (lo - p0[i]) / d;
      double tb = (hi - p0[i]) / d;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 >= t1) return false;
    }
  }
  return (t1 - t0) > 1e-9;
}

bool segment_clear(const Scene& scene, const Vec3& p0, const Vec3& p1) {
  for (const Box& b : scene.obstacles)
    if (segment_hits_box(p0, p1, b)) return false;
  return true;
}

Vec3 mirror(const Vec3& p, const Surface& s) {
  Vec3 m = p;
  m[s.axis] = 2.0 * s.plane - p[s.axis];
  return m;
}

// Intersection of segment p0 -> p1 with the surface plane. Returns false when
// the segment misses the plane, the crossing parameter leaves (0,1), or the
// crossing point falls outside the rectangle.
bool cross_point(const Vec3& p0, const Vec3& p1, const Surface& s, Vec3* out) {
  double d = p1[s.axis] - p0[s.axis];
  if (std::abs(d) < 1e-15) return false;
  double t = (s.plane - p0[s.axis]) / d;
  if (t <= 0.0 || t >= 1.0) return false;
  Vec3 r = p0 + t * (p1 - p0);
  r[s.axis] = s.plane;
  if (r[s.au] < s.ulo - kRectTol || r[s.au] > s.uhi + kRectTol) return false;
  if (r[s.av] < s.vlo - kRectTol || r[s.av] > s.vhi + kRectTol) return false;
  *out = r;
  return true;
}

bool front_side(const Vec3& p, const Surface& s) {
  return (p[s.axis] - s.plane) * s.normal[s.axis] > 1e-12;
}

PropPath finish_path(const Scene& scene, std::vector<Vec3> vertices,
                     std::vector<std::string> surface_ids, double rho_product) {
  PropPath path;
  path.vertices = std::move(vertices);
  path.surface_ids = std::move(surface_ids);
  path.order = static_cast<int>(path.surface_ids.size());
  double len = 0.0;
  for (std::size_t i = 1; i < path.vertices.size(); ++i)
    len += (path.vertices[i] - path.vertices[i - 1]).norm();
  path.length = len;
  double wl = scene.wavelength();
  double amp = wl / (4.0 * kPi * len) * rho_product;
  double phase = -2.0 * kPi * len / wl;
  path.gain = std::complex<double>(amp * std::cos(phase), amp * std::sin(phase));
  path.departure = link_angles(path.vertices.front(), path.vertices[1]);
  path.arrival = link_angles(path.vertices.back(),
                             path.vertices[path.vertices.size() - 2]);
  return path;
}

}  // namespace

std::vector<Surface> Scene::surfaces() const {
  std::vector<Surface> out;
  // Room faces reflect inward. box_surfaces emits them in the wall_rho order.
  std::vector<Surface> walls;
  box_surfaces(room_lo, room_hi, false, 0.0, "wall_", &walls);
  for (std::size_t i = 0; i < walls.size(); ++i) {
    walls[i].rho = wall_rho[i];
    out.push_back(walls[i]);
  }
  for (const Box& b : obstacles)
    box_surfaces(b.lo, b.hi, true, b.rho, b.id + "_", &out);
  return out;
}

const UpaGeometry& Scene::node(const std::string& id) const {
  if (id == "sta") return sta;
  if (id == "relay_rx") return relay_rx;
  if (id == "relay_tx") return relay_tx;
  if (id == "ap") return ap;
  if (id.rfind("interferer", 0) == 0) {
    std::size_t k = std::stoul(id.substr(10));
    if (k < interferers.size()) return interferers[k];
  }
  throw std::invalid_argument("unknown node id: " + id);
}

bool Scene::link_blocked(const std::string& a, const std::string& b) const {
  for (const auto& [x, y] : blocked_links)
    if ((x == a && y == b) || (x == b && y == a)) return true;
  return false;
}

void Scene::validate() const {
  auto inside = [&](const Vec3& p) {
    for (int i = 0; i < 3; ++i)
      if (p[i] <= room_lo[i] || p[i] >= room_hi[i]) return false;
    return true;
  };
  std::vector<const UpaGeometry*> nodes = {&sta, &relay_rx, &relay_tx, &ap};
  for (const auto& g : interferers) nodes.push_back(&g);
  for (const auto* g : nodes) {
    if (!inside(g->position))
      throw std::runtime_error("scene: node position outside room");
    if (g->nx < 1 || g->ny < 1 || g->dx <= 0 || g->dy <= 0)
      throw std::runtime_error("scene: bad array geometry");
    if (std::abs(g->boresight.norm() - 1.0) > 1e-9)
      throw std::runtime_error("scene: boresight must be a unit vector");
  }
  if (interferers.empty()) throw std::runtime_error("scene: needs an interferer");
  for (double r : wall_rho)
    if (r < 0.0 || r > 1.0) throw std::runtime_error("scene: wall rho out of range");
  for (const Box& b : obstacles) {
    if (b.rho < 0.0 || b.rho > 1.0)
      throw std::runtime_error("scene: obstacle rho out of range");
    for (int i = 0; i < 3; ++i)
      if (b.lo[i] >= b.hi[i]) throw std::runtime_error("scene: empty obstacle box");
  }
  if (p_sta_w <= 0 || p_interferer_w <= 0 || noise_w <= 0 ||
      amplification <= 0 || carrier_hz <= 0 || bandwidth_hz <= 0)
    throw std::runtime_error("scene: powers and rates must be positive");
}

std::vector<PropPath> trace_paths(const Scene& scene, const std::string& a,
                                  const std::string& b, int max_order) {
  if (max_order < 0 || max_order > 2)
    throw std::invalid_argument("trace_paths: max_order must be 0, 1 or 2");
  if (a == b) throw std::invalid_argument("trace_paths: identical endpoints");
  Vec3 pa = scene.node(a).position;
  Vec3 pb = scene.node(b).position;
  std::vector<PropPath> out;

  if (!scene.link_blocked(a, b) && segment_clear(scene, pa, pb))
    out.push_back(finish_path(scene, {pa, pb}, {}, 1.0));

  if (max_order < 1) return out;
  std::vector<Surface> surfs = scene.surfaces();

  for (const Surface& s : surfs) {
    if (!front_side(pa, s) || !front_side(pb, s)) continue;
    Vec3 img = mirror(pa, s);
    Vec3 r;
    if (!cross_point(img, pb, s, &r)) continue;
    if (!segment_clear(scene, pa, r) || !segment_clear(scene, r, pb)) continue;
    out.push_back(finish_path(scene, {pa, r, pb}, {s.id}, s.rho));
  }

  if (max_order < 2) return out;

  for (std::size_t i = 0; i < surfs.size(); ++i) {
    for (std::size_t j = 0; j < surfs.size(); ++j) {
      if (i == j) continue;
      const Surface& s1 = surfs[i];
      const Surface& s2 = surfs[j];
      if (!front_side(pa, s1) || !front_side(pb, s2)) continue;
      Vec3 img1 = mirror(pa, s1);
      Vec3 img2 = mirror(img1, s2);
      Vec3 r2;
      if (!cross_point(img2, pb, s2, &r2)) continue;
      Vec3 r1;
      if (!cross_point(img1, r2, s1, &r1)) continue;
      // Bounce geometry: each reflection sees its neighbors on the front side.
      if (!front_side(r2, s1) || !front_side(r1, s2)) continue;
      if (!segment_clear(scene, pa, r1) || !segment_clear(scene, r1, r2) ||
          !segment_clear(scene, r2, pb))
        continue;
      out.push_back(finish_path(scene, {pa, r1, r2, pb}, {s1.id, s2.id},
                                s1.rho * s2.rho));
    }
  }
  return out;
}

ChannelMatrix channel_matrix(const Scene& scene, const std::vector<PropPath>& paths,
                             const UpaGeometry& tx, const UpaGeometry& rx) {
  ChannelMatrix cm;
  cm.entries = CMat::Zero(rx.n(), tx.n());
  double wl = scene.wavelength();
  for (const PropPath& p : paths) {
    SteeringVector a_rx =
        steering_vector(rx, to_local_frame(p.arrival, rx), wl);
    SteeringVector a_tx =
        steering_vector(tx, to_local_frame(p.departure, tx), wl);
    cm.entries.noalias() += p.gain * (a_rx.weights * a_tx.weights.adjoint());
  }
  return cm;
}

ChannelMatrix cascaded_channel(const ChannelMatrix& h, const RelayPhaseMatrix& phi,
                               const ChannelMatrix& g) {
  if (h.entries.cols() != phi.matrix.rows() ||
      phi.matrix.cols() != g.entries.rows())
    throw std::invalid_argument("cascaded_channel: dimension mismatch");
  ChannelMatrix c;
  c.tx_node = g.tx_node;
  c.rx_node = h.rx_node;
  c.entries = h.entries * phi.matrix * g.entries;
  return c;
}

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
  return 1.380649e-23 * 290.0 * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json node_json(const UpaGeometry& g) {
  return json{{"position", vec_json(g.position)},
              {"boresight", vec_json(g.boresight)},
              {"nx", g.nx},
              {"ny", g.ny},
              {"dx", g.dx},
              {"dy", g.dy}};
}

UpaGeometry node_from(const json& j) {
  UpaGeometry g;
  g.position = vec_from(j.at("position"));
  g.boresight = vec_from(j.at("boresight"));
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  g.dx = j.at("dx").get<double>();
  g.dy = j.at("dy").get<double>();
  return g;
}

}  // namespace

std::string scene_to_json(const Scene& s) {
  json j;
  j["room"] = {{"min", vec_json(s.room_lo)}, {"max", vec_json(s.room_hi)}};
  j["wall_reflection"] = s.wall_rho;
  j["obstacles"] = json::array();
  for (const Box& b : s.obstacles)
    j["obstacles"].push_back({{"id", b.id},
                              {"min", vec_json(b.lo)},
                              {"max", vec_json(b.hi)},
                              {"reflection", b.rho}});
  j["carrier_hz"] = s.carrier_hz;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["tx_power_w"] = s.p_sta_w;
  j["interferer_power_w"] = s.p_interferer_w;
  j["noise_power_w"] = s.noise_w;
  j["amplification"] = s.amplification;
  j["nodes"]["sta"] = node_json(s.sta);
  j["nodes"]["relay_rx"] = node_json(s.relay_rx);
  j["nodes"]["relay_tx"] = node_json(s.relay_tx);
  j["nodes"]["ap"] = node_json(s.ap);
  j["nodes"]["interferers"] = json::array();
  for (const auto& g : s.interferers) j["nodes"]["interferers"].push_back(node_json(g));
  j["tx_region"] = {{"min", vec_json(s.tx_region_lo)}, {"max", vec_json(s.tx_region_hi)}};
  j["blocked_links"] = json::array();
  for (const auto& [x, y] : s.blocked_links)
    j["blocked_links"].push_back(json::array({x, y}));
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json j = json::parse(text);
  Scene s;
  s.room_lo = vec_from(j.at("room").at("min"));
  s.room_hi = vec_from(j.at("room").at("max"));
  auto wr = j.at("wall_reflection");
  for (int i = 0; i < 6; ++i) s.wall_rho[i] = wr.at(i).get<double>();
  for (const auto& b : j.at("obstacles")) {
    Box box;
    box.id = b.at("id").get<std::string>();
    box.lo = vec_from(b.at("min"));
    box.hi = vec_from(b.at("max"));
    box.rho = b.at("reflection").get<double>();
    s.obstacles.push_back(box);
  }
  s.carrier_hz = j.at("carrier_hz").get<double>();
  s.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  s.p_sta_w = j.at("tx_power_w").get<double>();
  s.p_interferer_w = j.at("interferer_power_w").get<double>();
  s.noise_w = j.at("noise_power_w").get<double>();
  s.amplification = j.at("amplification").get<double>();
  s.sta = node_from(j.at("nodes").at("sta"));
  s.relay_rx = node_from(j.at("nodes").at("relay_rx"));
  s.relay_tx = node_from(j.at("nodes").at("relay_tx"));
  s.ap = node_from(j.at("nodes").at("ap"));
  for (const auto& g : j.at("nodes").at("interferers"))
    s.interferers.push_back(node_from(g));
  s.tx_region_lo = vec_from(j.at("tx_region").at("min"));
  s.tx_region_hi = vec_from(j.at("tx_region").at("max"));
  for (const auto& bl : j.at("blocked_links"))
    s.blocked_links.emplace_back(bl.at(0).get<std::string>(),
                                 bl.at(1).get<std::string>());
  s.validate();
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scene file: " + path);
  out << scene_to_json(scene);
}

Scene make_default_scene() {
  Scene s;
  s.room_lo = Vec3(0, 0, 0);
  s.room_hi = Vec3(9.5, 6, 3);
  s.wall_rho = {0.6, 0.6, 0.6, 0.6, 0.6, 0.6};
  s.obstacles.push_back({Vec3(1.0, 4.2, 0.0), Vec3(1.8, 5.0, 1.1), 0.3, "cabinet"});
  s.obstacles.push_back({Vec3(8.6, 0.4, 0.0), Vec3(9.2, 1.0, 0.9), 0.3, "crate"});

  s.carrier_hz = 60.48e9;
  s.bandwidth_hz = 1.2e9;
  s.p_sta_w = 0.1;
  s.p_interferer_w = 0.1;
  s.noise_w = thermal_noise_w(s.bandwidth_hz, 10.0);
  s.amplification = 1.0;

  double half_wl = s.wavelength() / 2.0;
  auto upa = [&](const Vec3& pos, const Vec3& toward) {
    UpaGeometry g;
    g.nx = 2;
    g.ny = 8;
    g.dx = half_wl;
    g.dy = half_wl;
    g.position = pos;
    g.boresight = (toward - pos).normalized();
    return g;
  };

  Vec3 relay_rx_pos(7.0, 5.5, 2.0);
  Vec3 relay_tx_pos(7.2, 5.5, 2.0);
  Vec3 ap_pos(9.0, 2.0, 1.2);
  Vec3 region_center(4.95, 1.95, 0.9);

  s.relay_rx = upa(relay_rx_pos, region_center);
  s.relay_tx = upa(relay_tx_pos, ap_pos);
  s.ap = upa(ap_pos, relay_tx_pos);
  s.sta = upa(Vec3(4.2, 2.6, 0.9), relay_rx_pos);
  s.interferers.push_back(upa(Vec3(6.2, 1.2, 0.9), relay_rx_pos));

  s.tx_region_lo = Vec3(3.4, 1.0, 0.9);
  s.tx_region_hi = Vec3(6.5, 2.9, 0.9);
  s.blocked_links.emplace_back("sta", "ap");
  return s;
}

std::string scene_hash(const Scene& scene) {
  std::string text = scene_to_json(scene);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Scene perturb_materials(const Scene& scene, double frac, std::uint64_t seed) {
  Scene out = scene;
  Rng rng(Rng::mix(seed, 0xa110c8ull));
  auto jitter = [&](double rho) {
    double v = rho * rng.uniform(1.0 - frac, 1.0 + frac);
    return std::clamp(v, 0.0, 1.0);
  };
  for (double& r : out.wall_rho) r = jitter(r);
  for (Box& b : out.obstacles) b.rho = jitter(b.rho);
  return out;
}

}  // namespace twinbeam
