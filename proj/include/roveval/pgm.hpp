#pragma once

#include <string>

#include "roveval/types.hpp"

namespace roveval {

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Parses only the header of a binary (P5) PGM file. Used to probe frame
// resolutions without decoding the raster.
PgmHeader read_pgm_header(const std::string& path);

// Ground-truth label masks are 8-bit P5 PGM with maxval 255 and the pixel
// values restricted to {0 = background, 1 = obstacle, 255 = void}.
LabelMask load_label_mask(const std::string& path);
void save_label_mask(const LabelMask& mask, const std::string& path);

// Road masks are 8-bit P5 PGM; any nonzero sample counts as road.
BinaryMask load_road_mask(const std::string& path);
void save_road_mask(const BinaryMask& mask, const std::string& path);

// Instance maps are 16-bit P5 PGM (maxval 65535, big-endian samples per the
// PGM convention); 0 = no instance, k >= 1 = instance id.
InstanceMap load_instance_map(const std::string& path);
void save_instance_map(const InstanceMap& map, const std::string& path);

}  // namespace roveval
