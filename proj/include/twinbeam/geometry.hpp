#pragma once

#include <Eigen/Dense>

namespace twinbeam {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

// Azimuth/elevation pair in radians. Two uses share this type:
//  * world link angles: az measured in the xy plane from +x, el above the
//    horizon (asin of the z component);
//  * array-relative polar angles: el measured off the boresight axis,
//    az around it (see polar_angles below). Broadside is (0, 0) in both.
struct Angles {
  double az = 0.0;
  double el = 0.0;
};

// Wrap to (-pi, pi]; -pi normalizes to +pi so serialized angles are unique.
double wrap_pi(double a);

// World-frame direction angles of the segment a -> b.
// Throws std::invalid_argument if the points coincide (within 1e-9 m).
Angles link_angles(const Vec3& a, const Vec3& b);

// Unit direction for world link angles.
Vec3 dir_from_angles(const Angles& w);

// Right-handed orthonormal basis attached to an array.
// f1 = boresight, f2 = horizontal axis (z x f1 normalized), f3 = f1 x f2.
// For a boresight within 1e-6 of +/-z the horizontal axis falls back to +y.
struct Frame {
  Vec3 f1, f2, f3;
};

Frame frame_from_boresight(const Vec3& boresight);

// Polar-convention angles of a world direction relative to a frame:
// el is the angle off f1 (folded into [0, pi/2]; a planar phase profile
// cannot distinguish front from back), az = atan2(d.f2, -d.f3).
// Directions within 1e-12 of the boresight axis report az = 0 exactly.
Angles polar_angles(const Frame& fr, const Vec3& dir_world);

// Inverse of polar_angles on the front hemisphere.
Vec3 dir_from_polar(const Frame& fr, const Angles& polar);

// Horizon-style scan angles relative to a frame: el above the f1-f2 plane,
// az from f1 toward f2. This is the parameterization codebooks and
// optimizers search over.
Angles scan_angles(const Frame& fr, const Vec3& dir_world);
Vec3 dir_from_scan(const Frame& fr, const Angles& scan);

// Convert a scan direction to the polar angles the phase law expects.
Angles steer_from_scan(const Angles& scan);

}  // namespace twinbeam
