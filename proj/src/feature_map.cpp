// Copyright 2026 The xview Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "xview/feature_map.hpp"

#include <cstring>

#include "byte_io.hpp"
#include "xview/calib_io.hpp"
#include "xview/error.hpp"

namespace xview {

namespace {
constexpr std::size_t kGridHeader = 4 + 4 * 4;
}

std::vector<std::byte> serialize_grid(const FeatureMap& map) {
  std::vector<std::byte> out;
  out.reserve(kGridHeader + map.values.size() * sizeof(float));
  const auto* magic = reinterpret_cast<const std::byte*>(kGridMagic);
  out.insert(out.end(), magic, magic + 4);
  detail::append_le(out, map.rows);
  detail::append_le(out, map.cols);
  detail::append_le(out, map.channels);
  detail::append_le(out, kGridDtypeF32);
  detail::append_le_array<float>(out, map.values);
  return out;
}

FeatureMap deserialize_grid(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kGridMagic, 4) != 0) {
    fail(ErrorCode::kBadMagic, "not a feature grid (expected magic 'XVFG')");
  }
  if (bytes.size() < kGridHeader) fail(ErrorCode::kTruncated, "feature grid header is truncated");
  const auto* p = bytes.data() + 4;
  const auto rows = detail::load_le<std::uint32_t>(p);
  const auto cols = detail::load_le<std::uint32_t>(p + 4);
  const auto channels = detail::load_le<std::uint32_t>(p + 8);
  const auto dtype = detail::load_le<std::uint32_t>(p + 12);
  if (dtype != kGridDtypeF32) {
    fail(ErrorCode::kInvalidArgument, "unsupported feature grid dtype " + std::to_string(dtype));
  }
  // rows * cols fits in 64 bits; bound it before multiplying by channels.
  const std::uint64_t grid_cells = static_cast<std::uint64_t>(rows) * cols;
  const std::uint64_t payload = bytes.size() - kGridHeader;
  if (channels != 0 && grid_cells > payload / channels) {
    fail(ErrorCode::kTruncated, "feature grid payload does not match its header");
  }
  const std::size_t count = grid_cells * channels;
  if (bytes.size() != kGridHeader + count * sizeof(float)) {
    fail(ErrorCode::kTruncated, "feature grid payload does not match its header");
  }
  FeatureMap map(rows, cols, channels);
  detail::load_le_array<float>(bytes.data() + kGridHeader, map.values);
  return map;
}

void save_grid(const std::string& path, const FeatureMap& map) {
  write_binary_file(path, serialize_grid(map));
}

FeatureMap load_grid(const std::string& path) {
  return deserialize_grid(read_binary_file(path));
}

}  // namespace xview
