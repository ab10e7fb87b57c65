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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xview {

using Mat33 = std::array<double, 9>;   // row-major
using Mat34 = std::array<double, 12>;  // row-major

/// One `key: v0 v1 ...` line of a KITTI calibration file, kept verbatim so a
/// file can be written back in its original order.
struct CalibrationEntry {
  std::string key;
  std::vector<double> values;
};

/// The three matrices needed to project LIDAR points into camera 2, plus
/// every line of the source file.
struct RawCalibration {
  Mat34 cam_projection{};  // P2
  Mat33 rect_rotation{};   // R0_rect (or R_rect)
  Mat34 lidar_to_cam{};    // Tr_velo_to_cam
  std::string rect_key = "R0_rect";
  std::vector<CalibrationEntry> entries;
};

/// Composed LIDAR -> homogeneous pixel projection, [uw, vw, w] = P [x y z 1].
struct CalibrationChain {
  Mat34 P{};
};

struct Point {
  float x = 0.f;  // forward, meters
  float y = 0.f;  // left
  float z = 0.f;  // up
  float r = 0.f;  // reflectance in [0, 1]
};

struct PointCloud {
  std::vector<Point> points;
  // Number of records whose reflectance was clamped into [0, 1] on read.
  std::size_t clamped_reflectance = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Throws Error{kMissingKey | kMalformedNumber | kWrongArity | kNonFiniteValue}.
RawCalibration parse_calibration(std::string_view text);

/// Writes every entry as `key: %.12e ...`, the KITTI devkit layout. If the
/// calibration was not parsed from text, the three used matrices are written.
std::string format_calibration(const RawCalibration& calib);

CalibrationChain compose_chain(const RawCalibration& calib);

/// Decodes little-endian f32 quadruples (x, y, z, r).
/// Throws Error{kTruncatedRecord | kNonFiniteValue}.
PointCloud read_point_cloud(std::span<const std::byte> bytes);

std::vector<std::byte> write_point_cloud(const PointCloud& cloud);

// File helpers; throw Error{kIo} when the file cannot be read or written.
std::string read_text_file(const std::string& path);
std::vector<std::byte> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::byte> bytes);

RawCalibration load_calibration(const std::string& path);
PointCloud load_point_cloud(const std::string& path);

}  // namespace xview
