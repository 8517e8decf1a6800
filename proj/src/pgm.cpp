#include "roveval/pgm.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

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

bool is_pnm_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Reads the next decimal token of a PNM header, skipping whitespace and
// '#' comment lines.
long next_header_int(const std::string& data, std::size_t& pos,
                     const std::string& path) {
  while (pos < data.size()) {
    if (is_pnm_space(data[pos])) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size() || data[pos] < '0' || data[pos] > '9') {
    fail(ErrorCode::MalformedFile, "bad PGM header in '" + path + "'");
  }
  long value = 0;
  while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') {
    value = value * 10 + (data[pos] - '0');
    if (value > std::numeric_limits<int>::max()) {
      fail(ErrorCode::MalformedFile, "PGM header value overflow in '" + path + "'");
    }
    ++pos;
  }
  return value;
}

// Parses the P5 header and returns the offset of the first raster byte.
PgmHeader parse_header(const std::string& data, std::size_t& pos,
                       const std::string& path) {
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    fail(ErrorCode::MalformedFile, "'" + path + "' is not a binary (P5) PGM");
  }
  pos = 2;
  PgmHeader h;
  h.width = static_cast<int>(next_header_int(data, pos, path));
  h.height = static_cast<int>(next_header_int(data, pos, path));
  h.maxval = static_cast<int>(next_header_int(data, pos, path));
  if (pos >= data.size() || !is_pnm_space(data[pos])) {
    fail(ErrorCode::MalformedFile, "missing raster separator in '" + path + "'");
  }
  ++pos;  // exactly one whitespace byte before the raster
  require_positive_dims(h.width, h.height, path.c_str());
  if (h.maxval < 1 || h.maxval > 65535) {
    fail(ErrorCode::MalformedFile,
         "unsupported maxval " + std::to_string(h.maxval) + " in '" + path + "'");
  }
  return h;
}

void check_raster_size(const std::string& data, std::size_t pos,
                       std::size_t expected, const std::string& path) {
  if (data.size() - pos < expected) {
    fail(ErrorCode::MalformedFile, "truncated raster in '" + path + "'");
  }
  if (data.size() - pos > expected) {
    fail(ErrorCode::MalformedFile, "trailing bytes after raster in '" + path + "'");
  }
}

std::string header_string(int width, int height, int maxval) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "P5\n%d %d\n%d\n", width, height, maxval);
  return buf;
}

}  // namespace

PgmHeader read_pgm_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      fail(ErrorCode::MissingFile, "no such file: '" + path + "'");
    }
    fail(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  }
  char buf[512];
  in.read(buf, sizeof(buf));
  std::string head(buf, static_cast<std::size_t>(in.gcount()));
  std::size_t pos = 0;
  return parse_header(head, pos, path);
}

LabelMask load_label_mask(const std::string& path) {
  const std::string data = read_file_bytes(path);
  std::size_t pos = 0;
  const PgmHeader h = parse_header(data, pos, path);
  if (h.maxval != 255) {
    fail(ErrorCode::MalformedFile,
         "label mask '" + path + "' must have maxval 255, got " +
             std::to_string(h.maxval));
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  check_raster_size(data, pos, n, path);

  LabelMask mask;
  mask.width = h.width;
  mask.height = h.height;
  mask.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t v = static_cast<std::uint8_t>(data[pos + i]);
    if (!is_valid_label_value(v)) {
      fail(ErrorCode::IllegalLabelValue,
           "label value " + std::to_string(v) + " at pixel " +
               std::to_string(i) + " in '" + path + "' (expected 0, 1 or 255)");
    }
    mask.labels[i] = v;
  }
  return mask;
}

void save_label_mask(const LabelMask& mask, const std::string& path) {
  require_positive_dims(mask.width, mask.height, "LabelMask");
  std::string out = header_string(mask.width, mask.height, 255);
  out.append(reinterpret_cast<const char*>(mask.labels.data()),
             mask.labels.size());
  write_file_bytes(path, out);
}

BinaryMask load_road_mask(const std::string& path) {
  const std::string data = read_file_bytes(path);
  std::size_t pos = 0;
  const PgmHeader h = parse_header(data, pos, path);
  if (h.maxval != 255) {
    fail(ErrorCode::MalformedFile,
         "road mask '" + path + "' must have maxval 255, got " +
             std::to_string(h.maxval));
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  check_raster_size(data, pos, n, path);

  BinaryMask mask;
  mask.width = h.width;
  mask.height = h.height;
  mask.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask.bits[i] = data[pos + i] != 0 ? 1 : 0;
  }
  return mask;
}

void save_road_mask(const BinaryMask& mask, const std::string& path) {
  require_positive_dims(mask.width, mask.height, "BinaryMask");
  std::string out = header_string(mask.width, mask.height, 255);
  out.reserve(out.size() + mask.bits.size());
  for (std::uint8_t b : mask.bits) {
    out.push_back(b != 0 ? static_cast<char>(255) : 0);
  }
  write_file_bytes(path, out);
}

InstanceMap load_instance_map(const std::string& path) {
  const std::string data = read_file_bytes(path);
  std::size_t pos = 0;
  const PgmHeader h = parse_header(data, pos, path);
  if (h.maxval != 65535) {
    fail(ErrorCode::MalformedFile,
         "instance map '" + path + "' must have maxval 65535, got " +
             std::to_string(h.maxval));
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  check_raster_size(data, pos, n * 2, path);

  InstanceMap map;
  map.width = h.width;
  map.height = h.height;
  map.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t hi = static_cast<std::uint8_t>(data[pos + 2 * i]);
    const std::uint8_t lo = static_cast<std::uint8_t>(data[pos + 2 * i + 1]);
    map.ids[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return map;
}

void save_instance_map(const InstanceMap& map, const std::string& path) {
  require_positive_dims(map.width, map.height, "InstanceMap");
  std::string out = header_string(map.width, map.height, 65535);
  out.reserve(out.size() + map.ids.size() * 2);
  for (std::uint16_t id : map.ids) {
    out.push_back(static_cast<char>((id >> 8) & 0xff));
    out.push_back(static_cast<char>(id & 0xff));
  }
  write_file_bytes(path, out);
}

}  // namespace roveval
