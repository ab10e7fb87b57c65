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
#include <string_view>

#include "xview/calib_io.hpp"

namespace xview {

// Ray-cast simulation of a 64-beam spinning LIDAR (HDL-64E geometry, mounted
// 1.73 m above a flat road) in a street scene with buildings, parked and
// moving cars, pedestrians and poles. Used for demos and benchmarks where no
// recorded frames are available.
struct ScanConfig {
  std::uint32_t beams = 64;
  std::uint32_t azimuth_steps = 2083;
  double max_range = 80.0;
  double sensor_height = 1.73;
  double range_noise = 0.02;  // 1-sigma, meters
};

PointCloud simulate_scan(std::uint64_t seed, const ScanConfig& config = {});

/// Camera-2 calibration in KITTI text layout matching the simulated rig.
std::string_view reference_calibration_text() noexcept;

}  // namespace xview
