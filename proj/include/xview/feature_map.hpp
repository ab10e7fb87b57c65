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


#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xview {

/// Dense rows x cols x channels tensor, row-major with channels fastest.
/// Flattened it is the (rows*cols) x channels matrix that pooling multiplies.
template <typename T>
struct BasicFeatureMap {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t channels = 0;
  std::vector<T> values;

  BasicFeatureMap() = default;
  BasicFeatureMap(std::uint32_t r, std::uint32_t c, std::uint32_t ch)
      : rows(r), cols(c), channels(ch),
        values(static_cast<std::size_t>(r) * c * ch, T{}) {}

  std::size_t cells() const noexcept { return static_cast<std::size_t>(rows) * cols; }

  T& at(std::size_t cell, std::uint32_t ch) { return values[cell * channels + ch]; }
  const T& at(std::size_t cell, std::uint32_t ch) const {
    return values[cell * channels + ch];
  }
  std::span<T> cell(std::size_t i) { return {values.data() + i * channels, channels}; }
  std::span<const T> cell(std::size_t i) const {
    return {values.data() + i * channels, channels};
  }
};

using FeatureMap = BasicFeatureMap<float>;
using FeatureMapD = BasicFeatureMap<double>;

// Grid file: "XVFG", u32 rows, u32 cols, u32 channels, u32 dtype (1 = f32),
// then rows*cols*channels little-endian f32. Errors: kBadMagic, kTruncated,
// kInvalidArgument (unknown dtype).
inline constexpr char kGridMagic[4] = {'X', 'V', 'F', 'G'};
inline constexpr std::uint32_t kGridDtypeF32 = 1;

std::vector<std::byte> serialize_grid(const FeatureMap& map);
FeatureMap deserialize_grid(std::span<const std::byte> bytes);

void save_grid(const std::string& path, const FeatureMap& map);
FeatureMap load_grid(const std::string& path);

}  // namespace xview
