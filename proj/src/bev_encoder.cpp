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


#include "xview/bev_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xview/error.hpp"

namespace xview {

FeatureMap encode_bev(const PointCloud& cloud, const BevSpec& spec,
                      const BevEncoderConfig& config) {
  validate(spec);
  if (config.slices == 0) fail(ErrorCode::kInvalidArgument, "BEV encoding needs >= 1 slice");
  if (!(config.density_cap > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "density cap must be positive");
  }

  const std::uint32_t channels = kFirstHeightChannel + config.slices;
  FeatureMap grid(spec.map_rows(), spec.map_cols(), channels);
  std::vector<std::uint32_t> counts(grid.cells(), 0);
  const double thickness = (spec.z_max - spec.z_min) / config.slices;

  for (const auto& p : cloud.points) {
    const auto cell = bev_cell(spec, p.x, p.y, p.z);
    if (!cell) continue;
    const std::size_t i = cell->flat(grid.cols);
    ++counts[i];
    float& intensity = grid.at(i, kIntensityChannel);
    intensity = std::max(intensity, p.r);

    const double h = (static_cast<double>(p.z) - spec.z_min) / thickness;
    const auto slice = std::min<std::uint32_t>(static_cast<std::uint32_t>(h), config.slices - 1);
    float& height = grid.at(i, kFirstHeightChannel + slice);
    height = std::max(height, static_cast<float>(h));
  }

  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    grid.at(i, kDensityChannel) =
        static_cast<float>(std::min(1.0, counts[i] / config.density_cap));
  }
  return grid;
}

}  // namespace xview
