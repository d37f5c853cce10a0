#pragma once

#include <string>

#include "osmloc/bev.hpp"
#include "osmloc/camera.hpp"
#include "osmloc/embedding.hpp"
#include "osmloc/grid.hpp"

namespace osmloc {

// Loads a feature tensor from an OSMF file; header dims and frame tag are
// trusted after validation, payload must be finite.
FeatureGrid load_feature_tensor(const std::string& path);

struct SynthFeatures {
  FeatureGrid image;        // ImagePlane, U x V x 3*c_sem
  DepthDistribution alpha;  // one-hot per pixel
};

// Deterministic stand-in for a trained encoder: casts a ray per image
// column, samples the embedded map at every depth bin along it, and emits
// those samples as image features with a one-hot depth distribution (image
// row u observes bin u). Lifting the result through the BEV transform
// reproduces the map embedding inside the camera frustum at `pose`, up to
// interpolation, which makes exact self-localization tests possible.
// Requires cam.rows == bins.count.
SynthFeatures synth_image_features(const MapTile& tile, const EmbeddingTable& table,
                                   const Pose& pose, const CameraIntrinsics& cam,
                                   const DepthBins& bins);

}  // namespace osmloc
