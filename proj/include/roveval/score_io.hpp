#pragma once

#include <string>

#include "roveval/types.hpp"

namespace roveval {

// RVS1 score-map file layout:
//   bytes 0-3   ASCII "RVS1"
//   bytes 4-7   width,  u32 little-endian
//   bytes 8-11  height, u32 little-endian
//   then width*height IEEE-754 f32 little-endian, row-major, top-left origin.
ScoreMap load_score_map(const std::string& path);
void save_score_map(const ScoreMap& map, const std::string& path);

// RMT1 model-output file layout:
//   bytes 0-3  ASCII "RMT1"
//   u32 LE: N (queries), K (classes), H, W
//   then C as N*K f32 LE, then M as N*H*W f32 LE.
MaskTransformerOutput load_model_output(const std::string& path);
void save_model_output(const MaskTransformerOutput& out, const std::string& path);

}  // namespace roveval
