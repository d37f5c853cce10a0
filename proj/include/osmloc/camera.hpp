#pragma once

#include "osmloc/error.hpp"

namespace osmloc {

// Pinhole horizontal geometry of the feature lattice. `rows` (U) and `cols`
// (V) are feature-lattice dimensions, not raw sensor pixels; columns map to
// frustum azimuths via tan(az) = (v - cx) / fx.
struct CameraIntrinsics {
  double fx = 0.0;  // focal length, lattice pixels
  double cx = 0.0;  // principal column, in [0, cols)
  int rows = 0;     // U, image rows
  int cols = 0;     // V, image columns

  void validate() const {
    if (!(fx > 0.0)) throw InvariantError("camera: fx must be positive");
    if (cx < 0.0 || cx >= cols) throw InvariantError("camera: cx must lie in [0, cols)");
    if (rows < 1 || cols < 1) throw InvariantError("camera: empty image lattice");
  }
};

// Discrete depth sampling along each camera ray: bin i (1-based) sits at
// d_i = d0 + i * delta, i = 1..count.
struct DepthBins {
  double d0 = 0.0;
  double delta = 0.5;  // meters
  int count = 64;      // D

  double center(int index0) const { return d0 + (index0 + 1) * delta; }
  double min_depth() const { return d0 + delta; }
  double max_depth() const { return d0 + count * delta; }

  void validate() const {
    if (!(delta > 0.0)) throw InvariantError("depth bins: delta must be positive");
    if (count < 1) throw InvariantError("depth bins: need at least one bin");
  }
};

}  // namespace osmloc
