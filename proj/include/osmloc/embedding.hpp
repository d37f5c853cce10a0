#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "osmloc/grid.hpp"
#include "osmloc/taxonomy.hpp"

namespace osmloc {

// Seeded per-class semantic vectors standing in for learned embeddings.
// Class 0 (void) is the zero vector in every group; all other classes get
// distinct unit-norm vectors (pairwise cosine similarity < 0.99, enforced
// at build time by reseeding).
struct EmbeddingTable {
  int c_sem = 16;
  std::uint64_t seed = 0;
  // vectors[group][class_id * c_sem + k]
  std::array<std::vector<float>, 3> vectors;

  const float* vec(SemanticGroup group, int class_id) const {
    return vectors[static_cast<int>(group)].data() +
           static_cast<std::size_t>(class_id) * c_sem;
  }
  int group_classes(SemanticGroup group) const {
    return static_cast<int>(vectors[static_cast<int>(group)].size()) / c_sem;
  }
};

EmbeddingTable build_embedding_table(const ClassTaxonomy& taxonomy, int c_sem,
                                     std::uint64_t seed);

// Per-pixel concatenation [area | way | node] of the class vectors of the
// tile's three planes; output has 3 * c_sem channels on the map plane.
FeatureGrid embed_map(const MapTile& tile, const EmbeddingTable& table);

// Fixed seeded linear map from `in_channels` image/BEV channels to the
// 3 * c_sem semantic space. Identity when the channel counts already agree.
struct ChannelAdapter {
  int in_channels = 0;
  int out_channels = 0;
  bool identity = false;
  std::vector<float> weights;  // out_channels x in_channels, row-major

  // dst must hold out_channels floats.
  void apply(const float* src, float* dst) const;
};

ChannelAdapter make_channel_adapter(int in_channels, int out_channels, std::uint64_t seed);

}  // namespace osmloc
