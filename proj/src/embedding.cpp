#include "osmloc/embedding.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "osmloc/error.hpp"
#include "osmloc/rng.hpp"
#include "osmloc/simd/kernels.hpp"

namespace osmloc {

namespace {

void fill_unit_vectors(std::vector<float>& out, int classes, int c_sem,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.assign(static_cast<std::size_t>(classes) * c_sem, 0.0f);
  // class 0 stays zero (void convention)
  for (int cls = 1; cls < classes; ++cls) {
    double norm2 = 0.0;
    std::vector<double> v(c_sem);
    do {
      norm2 = 0.0;
      for (int k = 0; k < c_sem; ++k) {
        v[k] = gauss(rng);
        norm2 += v[k] * v[k];
      }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int k = 0; k < c_sem; ++k) {
      out[static_cast<std::size_t>(cls) * c_sem + k] = static_cast<float>(v[k] * inv);
    }
  }
}

bool all_pairs_distinct(const EmbeddingTable& table) {
  // Gather every non-void vector across groups and scan pairwise cosines.
  std::vector<const float*> vecs;
  for (int g = 0; g < 3; ++g) {
    const auto group = static_cast<SemanticGroup>(g);
    for (int cls = 1; cls < table.group_classes(group); ++cls) {
      vecs.push_back(table.vec(group, cls));
    }
  }
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      if (simd::dot_f32(vecs[i], vecs[j], table.c_sem) >= 0.99f) return false;
    }
  }
  return true;
}

}  // namespace

EmbeddingTable build_embedding_table(const ClassTaxonomy& taxonomy, int c_sem,
                                     std::uint64_t seed) {
  if (c_sem < 1) throw InvariantError("embedding: c_sem must be >= 1");

  EmbeddingTable table;
  table.c_sem = c_sem;
  table.seed = seed;

  // Reseed until every pair of non-void classes is distinguishable.
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto rng = make_rng(seed + attempt, "embedding");
    fill_unit_vectors(table.vectors[0], taxonomy.group_size(SemanticGroup::Area), c_sem, rng);
    fill_unit_vectors(table.vectors[1], taxonomy.group_size(SemanticGroup::Way), c_sem, rng);
    fill_unit_vectors(table.vectors[2], taxonomy.group_size(SemanticGroup::Node), c_sem, rng);
    if (all_pairs_distinct(table)) break;
    if (attempt > 64) {
      throw DataError("embedding: could not draw distinguishable class vectors");
    }
  }
  return table;
}

FeatureGrid embed_map(const MapTile& tile, const EmbeddingTable& table) {
  const RasterMap& raster = tile.raster;
  const int c_sem = table.c_sem;
  FeatureGrid out(raster.height, raster.width, 3 * c_sem, FrameTag::MapPlane);

  const int limits[3] = {table.group_classes(SemanticGroup::Area),
                         table.group_classes(SemanticGroup::Way),
                         table.group_classes(SemanticGroup::Node)};

  for (int row = 0; row < raster.height; ++row) {
    for (int col = 0; col < raster.width; ++col) {
      float* dst = out.cell(row, col);
      for (int plane = 0; plane < 3; ++plane) {
        const int id = raster.at(plane, row, col);
        if (id >= limits[plane]) {
          throw DataError("embed_map: invalid class id " + std::to_string(id) +
                          " in plane " + std::to_string(plane) + " at pixel (" +
                          std::to_string(row) + ", " + std::to_string(col) + ")");
        }
        std::memcpy(dst + plane * c_sem,
                    table.vec(static_cast<SemanticGroup>(plane), id),
                    sizeof(float) * c_sem);
      }
    }
  }
  return out;
}

void ChannelAdapter::apply(const float* src, float* dst) const {
  if (identity) {
    std::memcpy(dst, src, sizeof(float) * out_channels);
    return;
  }
  for (int o = 0; o < out_channels; ++o) {
    dst[o] = simd::dot_f32(weights.data() + static_cast<std::size_t>(o) * in_channels,
                           src, in_channels);
  }
}

ChannelAdapter make_channel_adapter(int in_channels, int out_channels, std::uint64_t seed) {
  if (in_channels < 1 || out_channels < 1) {
    throw InvariantError("channel adapter: channel counts must be positive");
  }
  ChannelAdapter adapter;
  adapter.in_channels = in_channels;
  adapter.out_channels = out_channels;
  adapter.identity = in_channels == out_channels;
  if (!adapter.identity) {
    auto rng = make_rng(seed, "channel-adapter");
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(in_channels));
    adapter.weights.resize(static_cast<std::size_t>(out_channels) * in_channels);
    for (auto& w : adapter.weights) w = static_cast<float>(gauss(rng));
  }
  return adapter;
}

}  // namespace osmloc
