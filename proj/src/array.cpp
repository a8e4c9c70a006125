#include "twinbeam/array.hpp"

#include <cmath>
#include <stdexcept>

namespace twinbeam {

double wrap_pi(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w = kPi;
  return w;
}

Angles link_angles(const Vec3& a, const Vec3& b) {
  Vec3 d = b - a;
  double len = d.norm();
  if (len < 1e-9) throw std::invalid_argument("link_angles: coincident points");
  double s = d.z() / len;
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return {wrap_pi(std::atan2(d.y(), d.x())), std::asin(s)};
}

Vec3 dir_from_angles(const Angles& w) {
  double ce = std::cos(w.el);
  return Vec3(ce * std::cos(w.az), ce * std::sin(w.az), std::sin(w.el));
}

Frame frame_from_boresight(const Vec3& boresight) {
  Frame fr;
  fr.f1 = boresight.normalized();
  Vec3 up(0, 0, 1);
  Vec3 h = up.cross(fr.f1);
  if (h.norm() < 1e-6) h = Vec3(0, 1, 0);
  fr.f2 = h.normalized();
  fr.f3 = fr.f1.cross(fr.f2);
  return fr;
}

Angles polar_angles(const Frame& fr, const Vec3& dir_world) {
  Vec3 d = dir_world.normalized();
  double d1 = d.dot(fr.f1);
  double d2 = d.dot(fr.f2);
  double d3 = d.dot(fr.f3);
  double r = std::hypot(d2, d3);
  if (r < 1e-12) return {0.0, 0.0};
  double el = std::atan2(r, std::abs(d1));  // folded: |d1| maps back to front
  double az = std::atan2(d2, -d3);
  return {wrap_pi(az), el};
}

Vec3 dir_from_polar(const Frame& fr, const Angles& polar) {
  double se = std::sin(polar.el);
  double d1 = std::cos(polar.el);
  double d2 = se * std::sin(polar.az);
  double d3 = -se * std::cos(polar.az);
  return fr.f1 * d1 + fr.f2 * d2 + fr.f3 * d3;
}

Angles scan_angles(const Frame& fr, const Vec3& dir_world) {
  Vec3 d = dir_world.normalized();
  double d1 = d.dot(fr.f1);
  double d2 = d.dot(fr.f2);
  double d3 = d.dot(fr.f3);
  double s = d3 > 1.0 ? 1.0 : (d3 < -1.0 ? -1.0 : d3);
  return {wrap_pi(std::atan2(d2, d1)), std::asin(s)};
}

Vec3 dir_from_scan(const Frame& fr, const Angles& scan) {
  double ce = std::cos(scan.el);
  return fr.f1 * (ce * std::cos(scan.az)) + fr.f2 * (ce * std::sin(scan.az)) +
         fr.f3 * std::sin(scan.el);
}

Angles steer_from_scan(const Angles& scan) {
  // Components of the scan direction in the frame basis.
  double ce = std::cos(scan.el);
  double d1 = ce * std::cos(scan.az);
  double d2 = ce * std::sin(scan.az);
  double d3 = std::sin(scan.el);
  double r = std::hypot(d2, d3);
  if (r < 1e-12) return {0.0, 0.0};
  return {wrap_pi(std::atan2(d2, -d3)), std::atan2(r, std::abs(d1))};
}

SteeringVector steering_vector(const UpaGeometry& geom, const Angles& polar,
                               double wavelength) {
  if (wavelength <= 0.0)
    throw std::invalid_argument("steering_vector: wavelength must be positive");
  SteeringVector sv;
  sv.wavelength = wavelength;
  sv.weights.resize(geom.n());
  double k = 2.0 * kPi / wavelength;
  double se = std::sin(polar.el);
  double px = geom.dx * se * std::cos(polar.az);
  double py = geom.dy * se * std::sin(polar.az);
  for (int iy = 0; iy < geom.ny; ++iy) {
    for (int ix = 0; ix < geom.nx; ++ix) {
      double phase = k * (px * ix + py * iy);
      sv.weights[iy * geom.nx + ix] =
          std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return sv;
}

Angles to_local_frame(const Angles& world, const UpaGeometry& geom) {
  return polar_angles(geom.frame(), dir_from_angles(world));
}

RelayPhaseMatrix relay_phase_matrix(const SteeringVector& w_out,
                                    const SteeringVector& w_in, double a) {
  if (a <= 0.0)
    throw std::invalid_argument("relay_phase_matrix: amplification must be positive");
  RelayPhaseMatrix phi;
  phi.amplification = a;
  phi.matrix = a * (w_out.weights * w_in.weights.adjoint());
  return phi;
}

}  // namespace twinbeam
