#pragma once

#include <complex>
#include <vector>

#include "twinbeam/scene.hpp"

namespace twinbeam {

// Effective relay-link quantities for fixed relay->AP pointing:
//   h   scalar through-relay term, combiner^H * H * amplification * precoder
//   g   uplink vector seen at the relay receive array from the STA
//   gk  same per interferer
struct EffectiveTerms {
  std::complex<double> h;
  CVec g;
  std::vector<CVec> gk;
};

EffectiveTerms effective_terms(const Scene& scene);

// Caches everything that does not depend on the relay receive beam, so a
// beam evaluation costs one steering vector and a few dot products.
// place_transmitters moves the mobile nodes (re-aimed at the relay) and
// recomputes only the uplink terms. Not safe to share across threads.
class TwinEvaluator {
public:
  explicit TwinEvaluator(const Scene& scene);

  void place_transmitters(const Vec3& p0, const std::vector<Vec3>& pk);

  // Relay receive beam given as scan angles in the relay_rx frame.
  double signal_power(const Angles& scan) const;
  double interference_power(const Angles& scan) const;  // includes noise
  double sinr(const Angles& scan) const;                // linear
  double sinr_db(const Angles& scan) const;

  std::complex<double> h() const { return terms_.h; }
  const EffectiveTerms& terms() const { return terms_; }
  const Scene& scene() const { return scene_; }

  // Scan angles that point the relay receive beam at a world position.
  Angles scan_toward(const Vec3& p) const;

private:
  CVec beam(const Angles& scan) const;
  Scene scene_;
  Frame rx_frame_;
  EffectiveTerms terms_;
};

// Pure single-shot forms. p-hat placements outside the room are clamped to
// the room box with a 1 cm margin before evaluation.
Vec3 clamp_to_room(const Scene& scene, const Vec3& p);
double signal_power(const Scene& scene, const Vec3& p0_hat, const Angles& scan);
double interference_plus_noise_power(const Scene& scene,
                                     const std::vector<Vec3>& pk_hat,
                                     const Angles& scan);
double sinr(const Scene& scene, const Angles& scan);
double rate(double gamma);

}  // namespace twinbeam
