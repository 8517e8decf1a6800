#include "roveval/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "roveval/errors.hpp"
#include "roveval/pgm.hpp"

namespace roveval {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json* find_member(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json* v = find_member(obj, key);
  if (v == nullptr || !v->is_string()) {
    fail(ErrorCode::SchemaViolation,
         where + ": '" + key + "' must be a string");
  }
  return v->get<std::string>();
}

// Optional string field: absent or null maps to "".
std::string optional_string(const json& obj, const char* key,
                            const std::string& where) {
  const json* v = find_member(obj, key);
  if (v == nullptr) return {};
  if (!v->is_string()) {
    fail(ErrorCode::SchemaViolation,
         where + ": '" + key + "' must be a string or null");
  }
  return v->get<std::string>();
}

std::string resolve_path(const fs::path& base, const std::string& raw) {
  if (raw.empty()) return raw;
  fs::path p(raw);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

void require_exists(const std::string& path, const std::string& where) {
  if (path.empty()) return;
  if (!fs::exists(path)) {
    fail(ErrorCode::MissingFile, where + ": referenced file '" + path +
                                     "' does not exist");
  }
}

}  // namespace

std::vector<SequenceManifest> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) {
      fail(ErrorCode::MissingFile, "no such manifest: '" + path + "'");
    }
    fail(ErrorCode::IoFailure, "cannot open manifest '" + path + "'");
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaViolation,
         "manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!root.is_object()) {
    fail(ErrorCode::SchemaViolation, "manifest root must be an object");
  }
  const std::string dataset = require_string(root, "dataset", "manifest");
  const json* sequences = find_member(root, "sequences");
  if (sequences == nullptr || !sequences->is_array()) {
    fail(ErrorCode::SchemaViolation, "manifest 'sequences' must be an array");
  }

  const fs::path base = fs::path(path).parent_path();
  std::vector<SequenceManifest> out;
  out.reserve(sequences->size());
  for (const json& seq : *sequences) {
    if (!seq.is_object()) {
      fail(ErrorCode::SchemaViolation, "sequence entries must be objects");
    }
    SequenceManifest m;
    m.dataset_name = dataset;
    m.sequence_id = require_string(seq, "id", "sequence");
    const std::string where = "sequence '" + m.sequence_id + "'";

    if (const json* fps = find_member(seq, "fps")) {
      if (!fps->is_number()) {
        fail(ErrorCode::SchemaViolation, where + ": 'fps' must be a number or null");
      }
      m.fps = fps->get<double>();
    }

    const json* frames = find_member(seq, "frames");
    if (frames == nullptr || !frames->is_array() || frames->empty()) {
      fail(ErrorCode::SchemaViolation,
           where + ": 'frames' must be a non-empty array");
    }
    m.frames.reserve(frames->size());
    bool have_prev = false;
    int prev_index = 0;
    for (const json& fr : *frames) {
      if (!fr.is_object()) {
        fail(ErrorCode::SchemaViolation, where + ": frame entries must be objects");
      }
      const json* idx = find_member(fr, "index");
      if (idx == nullptr || !idx->is_number_integer()) {
        fail(ErrorCode::SchemaViolation, where + ": frame 'index' must be an integer");
      }
      FrameEntry e;
      e.frame_index = idx->get<int>();
      if (have_prev && e.frame_index <= prev_index) {
        fail(ErrorCode::NonMonotoneFrameIndex,
             where + ": frame index " + std::to_string(e.frame_index) +
                 " follows " + std::to_string(prev_index));
      }
      have_prev = true;
      prev_index = e.frame_index;

      e.gt_mask_path = resolve_path(base, require_string(fr, "gt", where));
      e.score_map_path = resolve_path(base, optional_string(fr, "score", where));
      e.model_output_path =
          resolve_path(base, optional_string(fr, "model_output", where));
      e.instance_map_path =
          resolve_path(base, optional_string(fr, "instances", where));
      e.road_mask_path = resolve_path(base, optional_string(fr, "road", where));

      require_exists(e.gt_mask_path, where);
      require_exists(e.score_map_path, where);
      require_exists(e.model_output_path, where);
      require_exists(e.instance_map_path, where);
      require_exists(e.road_mask_path, where);
      m.frames.push_back(std::move(e));
    }
    out.push_back(std::move(m));
  }
  return out;
}

void save_manifest(const std::vector<SequenceManifest>& manifests,
                   const std::string& dataset_name, const std::string& path) {
  auto path_or_null = [](const std::string& p) -> ordered_json {
    if (p.empty()) return nullptr;
    return p;
  };

  ordered_json root;
  root["dataset"] = dataset_name;
  ordered_json seqs = ordered_json::array();
  for (const SequenceManifest& m : manifests) {
    ordered_json seq;
    seq["id"] = m.sequence_id;
    seq["fps"] = m.fps ? ordered_json(*m.fps) : ordered_json(nullptr);
    ordered_json frames = ordered_json::array();
    for (const FrameEntry& e : m.frames) {
      ordered_json fr;
      fr["index"] = e.frame_index;
      fr["gt"] = e.gt_mask_path;
      fr["score"] = path_or_null(e.score_map_path);
      fr["model_output"] = path_or_null(e.model_output_path);
      fr["instances"] = path_or_null(e.instance_map_path);
      fr["road"] = path_or_null(e.road_mask_path);
      frames.push_back(std::move(fr));
    }
    seq["frames"] = std::move(frames);
    seqs.push_back(std::move(seq));
  }
  root["sequences"] = std::move(seqs);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  }
  out << root.dump(2) << '\n';
  if (!out) {
    fail(ErrorCode::IoFailure, "write error on '" + path + "'");
  }
}

DatasetStats manifest_stats(const std::vector<SequenceManifest>& manifests) {
  if (manifests.empty()) {
    fail(ErrorCode::EmptyEvaluationDomain, "manifest_stats needs at least one sequence");
  }
  DatasetStats stats;
  stats.num_sequences = static_cast<int>(manifests.size());
  stats.num_frames = 0;
  for (const SequenceManifest& m : manifests) {
    stats.num_frames += static_cast<long long>(m.frames.size());
    const PgmHeader hdr = read_pgm_header(m.frames.front().gt_mask_path);
    stats.resolutions.emplace_back(hdr.width, hdr.height);
  }
  stats.avg_sequence_length =
      static_cast<double>(stats.num_frames) / stats.num_sequences;
  return stats;
}

}  // namespace roveval
