#include "roveval/types.hpp"

#include <algorithm>

namespace roveval {

void require_positive_dims(int width, int height, const char* what) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::MalformedFile,
         std::string(what) + ": dimensions must be at least 1x1, got " +
             std::to_string(width) + "x" + std::to_string(height));
  }
}

LabelMask LabelMask::filled(int width, int height, std::uint8_t value) {
  require_positive_dims(width, height, "LabelMask");
  LabelMask m;
  m.width = width;
  m.height = height;
  m.labels.assign(static_cast<std::size_t>(width) * height, value);
  return m;
}

ScoreMap ScoreMap::filled(int width, int height, float value) {
  require_positive_dims(width, height, "ScoreMap");
  ScoreMap m;
  m.width = width;
  m.height = height;
  m.scores.assign(static_cast<std::size_t>(width) * height, value);
  return m;
}

BinaryMask BinaryMask::filled(int width, int height, bool value) {
  require_positive_dims(width, height, "BinaryMask");
  BinaryMask m;
  m.width = width;
  m.height = height;
  m.bits.assign(static_cast<std::size_t>(width) * height, value ? 1 : 0);
  return m;
}

std::uint64_t BinaryMask::count() const {
  std::uint64_t n = 0;
  for (std::uint8_t b : bits) n += (b != 0);
  return n;
}

InstanceMap InstanceMap::filled(int width, int height, std::uint16_t value) {
  require_positive_dims(width, height, "InstanceMap");
  InstanceMap m;
  m.width = width;
  m.height = height;
  m.ids.assign(static_cast<std::size_t>(width) * height, value);
  return m;
}

}  // namespace roveval
