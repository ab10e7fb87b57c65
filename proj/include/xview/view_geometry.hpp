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
#include <optional>
#include <variant>

#include "xview/calib_io.hpp"

namespace xview {

/// Camera image (or a CNN feature map downsampled from it by `stride`).
struct FrontViewSpec {
  std::uint32_t width_px = 1280;
  std::uint32_t height_px = 384;
  std::uint32_t stride = 1;

  std::uint32_t map_width() const noexcept { return (width_px + stride - 1) / stride; }
  std::uint32_t map_height() const noexcept { return (height_px + stride - 1) / stride; }
  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(map_width()) * map_height();
  }
};

/// Bird's-eye-view grid. Rows run along x (forward), columns along y (left).
/// Cells are half-open: a point on a max boundary is outside the grid.
struct BevSpec {
  double x_min = 0.0, x_max = 60.0;
  double y_min = -30.0, y_max = 30.0;
  double z_min = -2.5, z_max = 1.0;
  double resolution = 0.1;  // meters per raw cell
  std::uint32_t stride = 1;

  double cell_size() const noexcept { return resolution * stride; }
  std::uint32_t map_rows() const noexcept;  // L_b
  std::uint32_t map_cols() const noexcept;  // W_b
  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(map_rows()) * map_cols();
  }
};

using ViewSpec = std::variant<FrontViewSpec, BevSpec>;

std::size_t view_cells(const ViewSpec& spec) noexcept;
std::uint32_t view_rows(const ViewSpec& spec) noexcept;
std::uint32_t view_cols(const ViewSpec& spec) noexcept;

/// Throws Error{kInvalidArgument} on a degenerate spec.
void validate(const FrontViewSpec& spec);
void validate(const BevSpec& spec);

struct CellIndex {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  std::size_t flat(std::uint32_t map_width) const noexcept {
    return static_cast<std::size_t>(row) * map_width + col;
  }
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct Projection {
  double u = 0.0;  // pixels
  double v = 0.0;
  double w = 0.0;  // depth
};

/// Empty when the point lies on or behind the image plane (w <= 0).
std::optional<Projection> project_point(const CalibrationChain& chain, double x,
                                        double y, double z) noexcept;

std::optional<CellIndex> front_cell(const FrontViewSpec& spec, double u,
                                    double v) noexcept;

std::optional<CellIndex> bev_cell(const BevSpec& spec, double x, double y,
                                  double z) noexcept;

}  // namespace xview
