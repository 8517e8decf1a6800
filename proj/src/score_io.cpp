#include "roveval/score_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace roveval {

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      fail(ErrorCode::MissingFile, "no such file: '" + path + "'");
    }
    fail(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  }
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorCode::IoFailure, "read error on '" + path + "'");
  }
  return data;
}

std::uint32_t read_u32le(const std::string& data, std::size_t pos) {
  return static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos])) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 3])) << 24);
}

float read_f32le(const std::string& data, std::size_t pos) {
  return std::bit_cast<float>(read_u32le(data, pos));
}

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_f32le(std::string& out, float f) {
  append_u32le(out, std::bit_cast<std::uint32_t>(f));
}

void write_file_bytes(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) {
    fail(ErrorCode::IoFailure, "write error on '" + path + "'");
  }
}

void check_magic(const std::string& data, const char* magic,
                 const std::string& path) {
  if (data.size() < 4 || std::memcmp(data.data(), magic, 4) != 0) {
    fail(ErrorCode::MalformedFile,
         "'" + path + "' does not start with " + magic);
  }
}

}  // namespace

ScoreMap load_score_map(const std::string& path) {
  const std::string data = read_file_bytes(path);
  check_magic(data, "RVS1", path);
  if (data.size() < 12) {
    fail(ErrorCode::MalformedFile, "truncated RVS1 header in '" + path + "'");
  }
  const std::uint32_t w = read_u32le(data, 4);
  const std::uint32_t h = read_u32le(data, 8);
  if (w < 1 || h < 1) {
    fail(ErrorCode::MalformedFile,
         "RVS1 dimensions " + std::to_string(w) + "x" + std::to_string(h) +
             " in '" + path + "'");
  }
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  const std::uint64_t payload = data.size() - 12;
  if (payload < n * 4) {
    fail(ErrorCode::MalformedFile,
         "RVS1 payload shorter than declared " + std::to_string(w) + "x" +
             std::to_string(h) + " grid in '" + path + "'");
  }
  if (payload > n * 4) {
    fail(ErrorCode::DimensionMismatch,
         "RVS1 payload larger than declared " + std::to_string(w) + "x" +
             std::to_string(h) + " grid in '" + path + "'");
  }

  ScoreMap map;
  map.width = static_cast<int>(w);
  map.height = static_cast<int>(h);
  map.scores.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const float v = read_f32le(data, 12 + i * 4);
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteScore,
           "non-finite score at pixel " + std::to_string(i) + " in '" + path + "'");
    }
    map.scores[i] = v;
  }
  return map;
}

void save_score_map(const ScoreMap& map, const std::string& path) {
  require_positive_dims(map.width, map.height, "ScoreMap");
  std::string out;
  out.reserve(12 + map.scores.size() * 4);
  out.append("RVS1");
  append_u32le(out, static_cast<std::uint32_t>(map.width));
  append_u32le(out, static_cast<std::uint32_t>(map.height));
  for (float f : map.scores) {
    append_f32le(out, f);
  }
  write_file_bytes(path, out);
}

MaskTransformerOutput load_model_output(const std::string& path) {
  const std::string data = read_file_bytes(path);
  check_magic(data, "RMT1", path);
  if (data.size() < 20) {
    fail(ErrorCode::MalformedFile, "truncated RMT1 header in '" + path + "'");
  }
  const std::uint32_t n = read_u32le(data, 4);
  const std::uint32_t k = read_u32le(data, 8);
  const std::uint32_t h = read_u32le(data, 12);
  const std::uint32_t w = read_u32le(data, 16);
  if (n < 1 || k < 1 || h < 1 || w < 1) {
    fail(ErrorCode::MalformedFile, "RMT1 header with zero extent in '" + path + "'");
  }
  const std::uint64_t c_count = static_cast<std::uint64_t>(n) * k;
  const std::uint64_t m_count = static_cast<std::uint64_t>(n) * h * w;
  const std::uint64_t expected = 20 + (c_count + m_count) * 4;
  if (data.size() < expected) {
    fail(ErrorCode::MalformedFile, "RMT1 payload shorter than header in '" + path + "'");
  }
  if (data.size() > expected) {
    fail(ErrorCode::DimensionMismatch,
         "RMT1 payload larger than header in '" + path + "'");
  }

  MaskTransformerOutput out;
  out.num_queries = static_cast<int>(n);
  out.num_classes = static_cast<int>(k);
  out.height = static_cast<int>(h);
  out.width = static_cast<int>(w);
  out.class_scores.resize(c_count);
  out.masks.resize(m_count);
  std::size_t pos = 20;
  for (std::uint64_t i = 0; i < c_count; ++i, pos += 4) {
    const float v = read_f32le(data, pos);
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteScore, "non-finite class score in '" + path + "'");
    }
    out.class_scores[i] = v;
  }
  for (std::uint64_t i = 0; i < m_count; ++i, pos += 4) {
    const float v = read_f32le(data, pos);
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteScore, "non-finite mask value in '" + path + "'");
    }
    out.masks[i] = v;
  }
  return out;
}

void save_model_output(const MaskTransformerOutput& out, const std::string& path) {
  std::string buf;
  buf.reserve(20 + (out.class_scores.size() + out.masks.size()) * 4);
  buf.append("RMT1");
  append_u32le(buf, static_cast<std::uint32_t>(out.num_queries));
  append_u32le(buf, static_cast<std::uint32_t>(out.num_classes));
  append_u32le(buf, static_cast<std::uint32_t>(out.height));
  append_u32le(buf, static_cast<std::uint32_t>(out.width));
  for (float f : out.class_scores) append_f32le(buf, f);
  for (float f : out.masks) append_f32le(buf, f);
  write_file_bytes(path, buf);
}

}  // namespace roveval
