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

#include <cstdint>

#include "xview/calib_io.hpp"
#include "xview/feature_map.hpp"
#include "xview/view_geometry.hpp"

namespace xview {

struct BevEncoderConfig {
  std::uint32_t slices = 7;     // height slices H_b
  double density_cap = 8.0;     // density = min(1, count / density_cap)
};

// Channel layout of an encoded grid.
inline constexpr std::uint32_t kDensityChannel = 0;
inline constexpr std::uint32_t kIntensityChannel = 1;
inline constexpr std::uint32_t kFirstHeightChannel = 2;

/// Hand-crafted BEV input: per cell [density, max reflectance, max height of
/// slice 0..slices-1]. The height of a point is (z - z_min) / slice
/// thickness. Empty cells and slices are 0. Result is independent of point
/// order. Throws Error{kInvalidArgument} for slices == 0 or cap <= 0.
FeatureMap encode_bev(const PointCloud& cloud, const BevSpec& spec,
                      const BevEncoderConfig& config = {});

}  // namespace xview
