#include "osmloc/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

constexpr std::uint16_t kOsmfVersion = 1;
constexpr std::uint16_t kOsmrVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError(std::string("truncated input while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_magic(std::ostream& out, const char magic[4]) { out.write(magic, 4); }

void check_magic(std::istream& in, const char magic[4], const char* name) {
  char got[4] = {};
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw FormatError(std::string("bad magic, not an ") + name + " stream");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_osmf(std::ostream& out, const FeatureGrid& grid) {
  put_magic(out, "OSMF");
  put_le<std::uint16_t>(out, kOsmfVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(grid.frame));
  put_le<std::uint8_t>(out, 3);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.rows));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.cols));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.channels));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(grid.data.data()),
              static_cast<std::streamsize>(grid.data.size() * sizeof(float)));
  } else {
    for (float v : grid.data) put_le<float>(out, v);
  }
  if (!out) throw FormatError("short write while emitting OSMF payload");
}

FeatureGrid read_osmf(std::istream& in) {
  check_magic(in, "OSMF", "OSMF");
  const auto version = get_le<std::uint16_t>(in, "OSMF version");
  if (version != kOsmfVersion) {
    throw FormatError("unsupported OSMF version " + std::to_string(version));
  }
  const auto tag = get_le<std::uint8_t>(in, "OSMF frame tag");
  if (tag > static_cast<std::uint8_t>(FrameTag::MapPlane)) {
    throw FormatError("unknown OSMF frame tag " + std::to_string(tag));
  }
  const auto rank = get_le<std::uint8_t>(in, "OSMF rank");
  if (rank != 3) throw FormatError("OSMF rank must be 3, got " + std::to_string(rank));
  const auto rows = get_le<std::uint32_t>(in, "OSMF rows");
  const auto cols = get_le<std::uint32_t>(in, "OSMF cols");
  const auto channels = get_le<std::uint32_t>(in, "OSMF channels");
  constexpr std::uint64_t kMaxElems = 1ull << 31;
  const std::uint64_t count =
      static_cast<std::uint64_t>(rows) * cols * channels;
  if (rows == 0 || cols == 0 || channels == 0 || count > kMaxElems) {
    throw FormatError("OSMF dims out of range");
  }

  FeatureGrid grid(static_cast<int>(rows), static_cast<int>(cols),
                   static_cast<int>(channels), static_cast<FrameTag>(tag));
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(grid.data.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::uint64_t>(in.gcount()) != count * sizeof(float)) {
      throw FormatError("truncated OSMF payload");
    }
  } else {
    for (auto& v : grid.data) v = get_le<float>(in, "OSMF payload");
  }
  // Anything after the payload means the header lied about the dims.
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("OSMF payload longer than header dims");
  }
  grid.require_finite("OSMF payload");
  return grid;
}

void write_osmf_file(const std::string& path, const FeatureGrid& grid) {
  auto out = open_out(path);
  write_osmf(out, grid);
}

FeatureGrid read_osmf_file(const std::string& path) {
  auto in = open_in(path);
  return read_osmf(in);
}

void write_osmr(std::ostream& out, const RasterMap& map) {
  put_magic(out, "OSMR");
  put_le<std::uint16_t>(out, kOsmrVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.height));
  put_le<double>(out, map.gsd);
  put_le<double>(out, map.origin.x);
  put_le<double>(out, map.origin.y);
  for (const auto& plane : map.planes) {
    out.write(reinterpret_cast<const char*>(plane.data()),
              static_cast<std::streamsize>(plane.size()));
  }
  if (!out) throw FormatError("short write while emitting OSMR payload");
}

RasterMap read_osmr(std::istream& in) {
  check_magic(in, "OSMR", "OSMR");
  const auto version = get_le<std::uint16_t>(in, "OSMR version");
  if (version != kOsmrVersion) {
    throw FormatError("unsupported OSMR version " + std::to_string(version));
  }
  const auto width = get_le<std::uint32_t>(in, "OSMR width");
  const auto height = get_le<std::uint32_t>(in, "OSMR height");
  const double gsd = get_le<double>(in, "OSMR gsd");
  const double ox = get_le<double>(in, "OSMR origin.x");
  const double oy = get_le<double>(in, "OSMR origin.y");
  constexpr std::uint64_t kMaxPixels = 1ull << 32;
  if (width == 0 || height == 0 ||
      static_cast<std::uint64_t>(width) * height > kMaxPixels) {
    throw FormatError("OSMR dims out of range");
  }
  if (!(gsd > 0.0) || !std::isfinite(gsd)) throw FormatError("OSMR gsd must be positive");
  if (!std::isfinite(ox) || !std::isfinite(oy)) throw FormatError("OSMR origin not finite");

  RasterMap map(static_cast<int>(width), static_cast<int>(height), gsd, LocalPoint{ox, oy});
  for (auto& plane : map.planes) {
    in.read(reinterpret_cast<char*>(plane.data()),
            static_cast<std::streamsize>(plane.size()));
    if (static_cast<std::size_t>(in.gcount()) != plane.size()) {
      throw FormatError("truncated OSMR payload");
    }
  }
  return map;
}

void write_osmr_file(const std::string& path, const RasterMap& map) {
  auto out = open_out(path);
  write_osmr(out, map);
}

RasterMap read_osmr_file(const std::string& path) {
  auto in = open_in(path);
  return read_osmr(in);
}

}  // namespace osmloc
