#pragma once

#include <iosfwd>
#include <string>

#include "osmloc/grid.hpp"

namespace osmloc {

// OSMF tensor container: magic "OSMF", version u16, frame_tag u8, rank u8
// (always 3), dims 3 x u32 (rows, cols, channels), payload f32 row-major.
// All fields little-endian.
void write_osmf(std::ostream& out, const FeatureGrid& grid);
void write_osmf_file(const std::string& path, const FeatureGrid& grid);
FeatureGrid read_osmf(std::istream& in);
FeatureGrid read_osmf_file(const std::string& path);

// OSMR raster container: magic "OSMR", version u16, width u32, height u32,
// gsd f64, origin 2 x f64, then 3 planes of u8 class ids, row-major.
// All fields little-endian.
void write_osmr(std::ostream& out, const RasterMap& map);
void write_osmr_file(const std::string& path, const RasterMap& map);
RasterMap read_osmr(std::istream& in);
RasterMap read_osmr_file(const std::string& path);

}  // namespace osmloc
