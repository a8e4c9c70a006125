#include "twinbeam/twin.hpp"

#include <cmath>
#include <stdexcept>

namespace twinbeam {

namespace {

constexpr int kTraceOrder = 2;

// Steering vector aimed along the direct line between two nodes.
SteeringVector aim(const UpaGeometry& from, const Vec3& toward, double wl) {
  Angles world = link_angles(from.position, toward);
  return steering_vector(from, to_local_frame(world, from), wl);
}

CVec uplink_vector(const Scene& scene, const std::string& tx_id) {
  const UpaGeometry& tx = scene.node(tx_id);
  auto paths = trace_paths(scene, tx_id, "relay_rx", kTraceOrder);
  ChannelMatrix g = channel_matrix(scene, paths, tx, scene.relay_rx);
  SteeringVector w_t = aim(tx, scene.relay_rx.position, scene.wavelength());
  return g.entries * w_t.weights;
}

}  // namespace

EffectiveTerms effective_terms(const Scene& scene) {
  EffectiveTerms t;
  double wl = scene.wavelength();
  auto paths_h = trace_paths(scene, "relay_tx", "ap", kTraceOrder);
  ChannelMatrix H = channel_matrix(scene, paths_h, scene.relay_tx, scene.ap);
  SteeringVector w_o = aim(scene.relay_tx, scene.ap.position, wl);
  SteeringVector w_r = aim(scene.ap, scene.relay_tx.position, wl);
  t.h = scene.amplification *
        (w_r.weights.adjoint() * H.entries * w_o.weights).value();
  t.g = uplink_vector(scene, "sta");
  for (std::size_t k = 0; k < scene.interferers.size(); ++k)
    t.gk.push_back(uplink_vector(scene, "interferer" + std::to_string(k)));
  return t;
}

TwinEvaluator::TwinEvaluator(const Scene& scene)
    : scene_(scene), rx_frame_(scene.relay_rx.frame()) {
  scene_.validate();
  terms_ = effective_terms(scene_);
}

void TwinEvaluator::place_transmitters(const Vec3& p0, const std::vector<Vec3>& pk) {
  if (pk.size() != scene_.interferers.size())
    throw std::invalid_argument("place_transmitters: interferer count mismatch");
  Vec3 rx = scene_.relay_rx.position;
  scene_.sta.position = clamp_to_room(scene_, p0);
  scene_.sta.boresight = (rx - scene_.sta.position).normalized();
  for (std::size_t k = 0; k < pk.size(); ++k) {
    scene_.interferers[k].position = clamp_to_room(scene_, pk[k]);
    scene_.interferers[k].boresight =
        (rx - scene_.interferers[k].position).normalized();
  }
  terms_.g = uplink_vector(scene_, "sta");
  for (std::size_t k = 0; k < pk.size(); ++k)
    terms_.gk[k] = uplink_vector(scene_, "interferer" + std::to_string(k));
}

CVec TwinEvaluator::beam(const Angles& scan) const {
  return steering_vector(scene_.relay_rx, steer_from_scan(scan),
                         scene_.wavelength())
      .weights;
}

double TwinEvaluator::signal_power(const Angles& scan) const {
  std::complex<double> v = terms_.h * (beam(scan).adjoint() * terms_.g).value();
  return std::norm(v) * scene_.p_sta_w;
}

double TwinEvaluator::interference_power(const Angles& scan) const {
  CVec w = beam(scan);
  double acc = scene_.noise_w;
  for (const CVec& gk : terms_.gk) {
    std::complex<double> v = terms_.h * (w.adjoint() * gk).value();
    acc += std::norm(v) * scene_.p_interferer_w;
  }
  return acc;
}

double TwinEvaluator::sinr(const Angles& scan) const {
  CVec w = beam(scan);
  std::complex<double> vs = terms_.h * (w.adjoint() * terms_.g).value();
  double num = std::norm(vs) * scene_.p_sta_w;
  double den = scene_.noise_w;
  for (const CVec& gk : terms_.gk) {
    std::complex<double> vi = terms_.h * (w.adjoint() * gk).value();
    den += std::norm(vi) * scene_.p_interferer_w;
  }
  return num / den;
}

double TwinEvaluator::sinr_db(const Angles& scan) const {
  double s = sinr(scan);
  return 10.0 * std::log10(s > 1e-30 ? s : 1e-30);
}

Angles TwinEvaluator::scan_toward(const Vec3& p) const {
  return scan_angles(rx_frame_, p - scene_.relay_rx.position);
}

Vec3 clamp_to_room(const Scene& scene, const Vec3& p) {
  const double margin = 0.01;
  Vec3 out = p;
  for (int i = 0; i < 3; ++i) {
    double lo = scene.room_lo[i] + margin;
    double hi = scene.room_hi[i] - margin;
    if (out[i] < lo) out[i] = lo;
    if (out[i] > hi) out[i] = hi;
  }
  return out;
}

double signal_power(const Scene& scene, const Vec3& p0_hat, const Angles& scan) {
  TwinEvaluator ev(scene);
  std::vector<Vec3> pk;
  for (const auto& g : scene.interferers) pk.push_back(g.position);
  ev.place_transmitters(p0_hat, pk);
  return ev.signal_power(scan);
}

double interference_plus_noise_power(const Scene& scene,
                                     const std::vector<Vec3>& pk_hat,
                                     const Angles& scan) {
  TwinEvaluator ev(scene);
  ev.place_transmitters(scene.sta.position, pk_hat);
  return ev.interference_power(scan);
}

double sinr(const Scene& scene, const Angles& scan) {
  return TwinEvaluator(scene).sinr(scan);
}

double rate(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("rate: negative ratio");
  return std::log2(1.0 + gamma);
}

}  // namespace twinbeam
