#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

// One frame of a sequence. Path members are absolute or manifest-relative
// after load_manifest resolves them; empty string means "not provided".
struct FrameEntry {
  int frame_index = 0;
  std::string gt_mask_path;
  std::string score_map_path;
  std::string model_output_path;
  std::string instance_map_path;
  std::string road_mask_path;
};

struct SequenceManifest {
  std::string dataset_name;
  std::string sequence_id;
  std::optional<double> fps;
  std::vector<FrameEntry> frames;
};

// Parses a JSON manifest and validates it: frame indices strictly increasing,
// at least one frame per sequence, every referenced file present on disk.
// Relative paths are resolved against the manifest's directory.
std::vector<SequenceManifest> load_manifest(const std::string& path);

// Writes manifests back out in the same JSON schema. Paths are emitted
// verbatim, so callers who want a relocatable manifest should store paths
// relative to where the file will live.
void save_manifest(const std::vector<SequenceManifest>& manifests,
                   const std::string& dataset_name, const std::string& path);

// Sequence/frame counts plus the per-sequence resolution probed from the
// first ground-truth header. Order of `resolutions` follows the input.
DatasetStats manifest_stats(const std::vector<SequenceManifest>& manifests);

}  // namespace roveval
