#pragma once

#include <Eigen/Dense>
#include <complex>

#include "twinbeam/geometry.hpp"

namespace twinbeam {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Uniform planar array: nx x ny elements on a rectangular grid.
// Element (ix, iy) sits at position + ix*dx*ex + iy*dy*ey where
// ex = -f3 (downward for a horizontal boresight) and ey = f2, so the
// ny axis spans the horizontal aperture.
struct UpaGeometry {
  int nx = 1;
  int ny = 1;
  double dx = 0.0;  // m
  double dy = 0.0;  // m
  Vec3 boresight = Vec3(1, 0, 0);  // unit
  Vec3 position = Vec3(0, 0, 0);   // m

  int n() const { return nx * ny; }
  Frame frame() const { return frame_from_boresight(boresight); }
};

struct SteeringVector {
  CVec weights;       // unit modulus, length nx*ny
  double wavelength;  // m
};

// Phase profile for polar-convention angles. Entry (iy*nx + ix) is
// exp(j*2*pi/lambda*(dx*ix*sin(el)*cos(az) + dy*iy*sin(el)*sin(az))).
// At el = 0 every entry is 1 regardless of az.
SteeringVector steering_vector(const UpaGeometry& geom, const Angles& polar,
                               double wavelength);

// World link angles -> polar angles in this array's frame.
Angles to_local_frame(const Angles& world, const UpaGeometry& geom);

// Rank-1 relay weight matrix: amplification * w_out * w_in^H.
struct RelayPhaseMatrix {
  CMat matrix;
  double amplification = 1.0;
};

RelayPhaseMatrix relay_phase_matrix(const SteeringVector& w_out,
                                    const SteeringVector& w_in, double a);

}  // namespace twinbeam
