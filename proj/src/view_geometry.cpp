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


#include "xview/view_geometry.hpp"

#include <cmath>

#include "xview/error.hpp"

namespace xview {

namespace {

// Cells along one axis. The epsilon keeps 60 / 0.1 from rounding up to 601.
std::uint32_t axis_cells(double lo, double hi, double resolution, std::uint32_t stride) {
  const double raw = (hi - lo) / resolution;
  return static_cast<std::uint32_t>(std::ceil(raw / stride - 1e-9));
}

// floor(((v - lo) / resolution) / stride); dividing in two steps makes the
// stride-2k bin exactly the parent of the stride-k bin.
std::optional<std::uint32_t> axis_bin(double v, double lo, double hi, double resolution,
                                      std::uint32_t stride, std::uint32_t cells) {
  if (!(v >= lo && v < hi)) return std::nullopt;
  const double t = (v - lo) / resolution;
  auto bin = static_cast<std::uint32_t>(std::floor(t / stride));
  if (bin >= cells) bin = cells - 1;
  return bin;
}

}  // namespace

std::uint32_t BevSpec::map_rows() const noexcept {
  return axis_cells(x_min, x_max, resolution, stride);
}

std::uint32_t BevSpec::map_cols() const noexcept {
  return axis_cells(y_min, y_max, resolution, stride);
}

std::size_t view_cells(const ViewSpec& spec) noexcept {
  return std::visit([](const auto& s) { return s.cells(); }, spec);
}

std::uint32_t view_rows(const ViewSpec& spec) noexcept {
  if (const auto* f = std::get_if<FrontViewSpec>(&spec)) return f->map_height();
  return std::get<BevSpec>(spec).map_rows();
}

std::uint32_t view_cols(const ViewSpec& spec) noexcept {
  if (const auto* f = std::get_if<FrontViewSpec>(&spec)) return f->map_width();
  return std::get<BevSpec>(spec).map_cols();
}

void validate(const FrontViewSpec& spec) {
  if (spec.width_px < 1 || spec.height_px < 1 || spec.stride < 1) {
    fail(ErrorCode::kInvalidArgument, "front view needs width, height and stride >= 1");
  }
}

void validate(const BevSpec& spec) {
  const bool finite = std::isfinite(spec.x_min) && std::isfinite(spec.x_max) &&
                      std::isfinite(spec.y_min) && std::isfinite(spec.y_max) &&
                      std::isfinite(spec.z_min) && std::isfinite(spec.z_max) &&
                      std::isfinite(spec.resolution);
  if (!finite || !(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min) ||
      !(spec.z_max > spec.z_min)) {
    fail(ErrorCode::kInvalidArgument, "BEV range needs max > min on every axis");
  }
  if (!(spec.resolution > 0.0) || spec.stride < 1) {
    fail(ErrorCode::kInvalidArgument, "BEV resolution must be > 0 and stride >= 1");
  }
  if (spec.map_rows() == 0 || spec.map_cols() == 0) {
    fail(ErrorCode::kInvalidArgument, "BEV grid is empty");
  }
}

std::optional<Projection> project_point(const CalibrationChain& chain, double x, double y,
                                        double z) noexcept {
  const auto& P = chain.P;
  const double uw = P[0] * x + P[1] * y + P[2] * z + P[3];
  const double vw = P[4] * x + P[5] * y + P[6] * z + P[7];
  const double w = P[8] * x + P[9] * y + P[10] * z + P[11];
  if (!(w > 0.0)) return std::nullopt;
  return Projection{uw / w, vw / w, w};
}

std::optional<CellIndex> front_cell(const FrontViewSpec& spec, double u, double v) noexcept {
  if (!(u >= 0.0 && u < spec.width_px && v >= 0.0 && v < spec.height_px)) return std::nullopt;
  // Pixel coordinates are already in raw units, so resolution is 1.
  const auto col = axis_bin(u, 0.0, spec.width_px, 1.0, spec.stride, spec.map_width());
  const auto row = axis_bin(v, 0.0, spec.height_px, 1.0, spec.stride, spec.map_height());
  return CellIndex{*row, *col};
}

std::optional<CellIndex> bev_cell(const BevSpec& spec, double x, double y, double z) noexcept {
  if (!(z >= spec.z_min && z < spec.z_max)) return std::nullopt;
  const auto row = axis_bin(x, spec.x_min, spec.x_max, spec.resolution, spec.stride,
                            spec.map_rows());
  if (!row) return std::nullopt;
  const auto col = axis_bin(y, spec.y_min, spec.y_max, spec.resolution, spec.stride,
                            spec.map_cols());
  if (!col) return std::nullopt;
  return CellIndex{*row, *col};
}

}  // namespace xview
