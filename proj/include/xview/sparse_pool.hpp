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
#include <span>
#include <string>
#include <vector>

#include "xview/calib_io.hpp"
#include "xview/feature_map.hpp"
#include "xview/view_geometry.hpp"

namespace xview {

enum class Direction : std::uint8_t { kFrontToBev = 0, kBevToFront = 1 };
enum class Kernel : std::uint8_t { kNearest = 0, kBilinear = 1 };

struct Provenance {
  FrontViewSpec front;
  BevSpec bev;
  std::string frame_id;
};

/// Row-normalized sparse matrix M (n_target x n_source) in CSR layout.
///
/// Each row holds strictly increasing column indices and positive weights;
/// a nonempty row sums to 1. Immutable once built, so one instance can be
/// applied from many threads at once.
class PoolingMatrix {
 public:
  PoolingMatrix() = default;

  /// Validates the CSR structure (offsets monotone, columns sorted, unique
  /// and in range, weights positive and finite). Row sums are not checked.
  /// Throws Error{kInvalidArgument}.
  static PoolingMatrix from_csr(Direction direction, std::uint64_t n_target,
                                std::uint64_t n_source,
                                std::vector<std::uint64_t> row_offsets,
                                std::vector<std::uint32_t> col_indices,
                                std::vector<float> weights);

  Direction direction() const noexcept { return direction_; }
  std::uint64_t n_target() const noexcept { return n_target_; }
  std::uint64_t n_source() const noexcept { return n_source_; }
  std::size_t nnz() const noexcept { return col_indices_.size(); }

  std::span<const std::uint64_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::uint32_t> col_indices() const noexcept { return col_indices_; }
  std::span<const float> weights() const noexcept { return weights_; }

  const std::optional<Provenance>& provenance() const noexcept { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

  // Build-time point accounting; zero for matrices that were loaded.
  std::size_t points_in_view() const noexcept { return points_in_view_; }
  std::size_t points_paired() const noexcept { return points_paired_; }

  /// Mᵀ as a matrix with swapped direction tag. Entries within each row stay
  /// sorted, so the result is canonical.
  PoolingMatrix transposed() const;

  bool operator==(const PoolingMatrix& o) const noexcept {
    return direction_ == o.direction_ && n_target_ == o.n_target_ &&
           n_source_ == o.n_source_ && row_offsets_ == o.row_offsets_ &&
           col_indices_ == o.col_indices_ && weights_ == o.weights_;
  }

 private:
  friend PoolingMatrix build_pooling_matrix(const PointCloud&, const CalibrationChain&,
                                            const ViewSpec&, const ViewSpec&, Kernel);

  Direction direction_ = Direction::kFrontToBev;
  std::uint64_t n_target_ = 0;
  std::uint64_t n_source_ = 0;
  std::vector<std::uint64_t> row_offsets_{0};
  std::vector<std::uint32_t> col_indices_;
  std::vector<float> weights_;
  std::optional<Provenance> provenance_;
  std::size_t points_in_view_ = 0;
  std::size_t points_paired_ = 0;
};

/// Pairs target and source cells through the LIDAR points visible in both
/// views. `src` and `dst` must be one front view and one BEV, in either
/// order; the direction follows from which is the source.
///
/// Nearest: each point adds weight 1 to (target cell, source cell).
/// Bilinear: each point spreads bilinear weights over the 4 source cells
/// around its continuous source coordinate; the target stays the nearest bin.
/// Duplicates are summed and every row is then normalized to sum 1.
///
/// Throws Error{kViewMismatch} when both specs are the same kind of view.
PoolingMatrix build_pooling_matrix(const PointCloud& cloud, const CalibrationChain& chain,
                                   const ViewSpec& src, const ViewSpec& dst,
                                   Kernel kernel);

/// B = M F. `threads` == 0 picks hardware concurrency. Output has n_target
/// cells shaped `out_rows` x `out_cols` (defaults to n_target x 1).
/// Throws Error{kShapeMismatch}.
template <typename T>
BasicFeatureMap<T> apply_pooling(const PoolingMatrix& m, const BasicFeatureMap<T>& f,
                                 unsigned threads = 1, std::uint32_t out_rows = 0,
                                 std::uint32_t out_cols = 0);

/// Mᵀ G, the gradient of <M F, G> with respect to F.
template <typename T>
BasicFeatureMap<T> apply_pooling_grad(const PoolingMatrix& m, const BasicFeatureMap<T>& g,
                                      unsigned threads = 1, std::uint32_t out_rows = 0,
                                      std::uint32_t out_cols = 0);

/// Raw SpMM over flat buffers: out[n_target x channels] = M in[n_source x channels].
void spmm(const PoolingMatrix& m, std::span<const float> in, std::size_t channels,
          std::span<float> out, unsigned threads = 1);

struct CoverageStats {
  double source_cells_used = 0.0;  // distinct columns / n_source
  double target_cells_used = 0.0;  // nonempty rows / n_target
  std::size_t points_in_view = 0;  // points projecting into the image
  std::size_t points_paired = 0;   // points visible in both views
  std::size_t nnz = 0;
};

CoverageStats coverage(const PoolingMatrix& m);

/// Max |row sum - 1| over nonempty rows.
double max_row_sum_error(const PoolingMatrix& m);

// Matrix file: "SNHP", u16 version, u8 direction, u64 n_target, u64 n_source,
// u64 nnz, u64 row_offsets[n_target+1], u32 col_indices[nnz], f32
// weights[nnz], u32 CRC-32 of everything before it. All little-endian.
inline constexpr char kMatrixMagic[4] = {'S', 'N', 'H', 'P'};
inline constexpr std::uint16_t kMatrixVersion = 1;

std::vector<std::byte> serialize_matrix(const PoolingMatrix& m);

/// Throws Error{kBadMagic | kTruncated | kChecksumMismatch | kInvalidArgument}.
/// A size that disagrees with the header counts is reported as kTruncated.
PoolingMatrix deserialize_matrix(std::span<const std::byte> bytes);

void save_matrix(const std::string& path, const PoolingMatrix& m);
PoolingMatrix load_matrix(const std::string& path);

}  // namespace xview
