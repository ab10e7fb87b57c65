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


#include "xview/sparse_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "byte_io.hpp"
#include "xview/error.hpp"

namespace xview {

namespace {

struct Triplet {
  std::uint64_t row;
  std::uint32_t col;
  double weight;
};

unsigned resolve_threads(unsigned threads, std::size_t rows) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  // Below a few thousand rows the spawn cost dominates.
  const std::size_t useful = std::max<std::size_t>(1, rows / 2048);
  return static_cast<unsigned>(std::min<std::size_t>(threads, useful));
}

// Splits [0, rows) into contiguous chunks; each row is owned by one thread,
// so results do not depend on the thread count.
template <typename Fn>
void parallel_rows(std::size_t rows, unsigned threads, Fn&& fn) {
  const unsigned n = resolve_threads(threads, rows);
  if (n <= 1) {
    fn(std::size_t{0}, rows);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  const std::size_t chunk = (rows + n - 1) / n;
  for (unsigned t = 0; t < n; ++t) {
    const std::size_t begin = std::min(rows, t * chunk);
    const std::size_t end = std::min(rows, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

template <typename T>
void spmm_rows(std::span<const std::uint64_t> offsets, std::span<const std::uint32_t> cols,
               std::span<const float> weights, const T* in, std::size_t channels, T* out,
               std::size_t n_rows, unsigned threads) {
  parallel_rows(n_rows, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc(channels);
    for (std::size_t r = begin; r < end; ++r) {
      T* dst = out + r * channels;
      const std::uint64_t lo = offsets[r], hi = offsets[r + 1];
      if (lo == hi) {
        std::fill(dst, dst + channels, T{});
        continue;
      }
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::uint64_t k = lo; k < hi; ++k) {
        const double w = weights[k];
        const T* src = in + static_cast<std::size_t>(cols[k]) * channels;
        for (std::size_t c = 0; c < channels; ++c) acc[c] += w * static_cast<double>(src[c]);
      }
      for (std::size_t c = 0; c < channels; ++c) dst[c] = static_cast<T>(acc[c]);
    }
  });
}

std::pair<std::uint32_t, std::uint32_t> output_dims(std::uint64_t n_cells, std::uint32_t rows,
                                                    std::uint32_t cols) {
  if (rows == 0 && cols == 0) {
    if (n_cells > std::numeric_limits<std::uint32_t>::max()) {
      fail(ErrorCode::kShapeMismatch, "output has too many cells for one column");
    }
    return {static_cast<std::uint32_t>(n_cells), 1};
  }
  if (static_cast<std::uint64_t>(rows) * cols != n_cells) {
    fail(ErrorCode::kShapeMismatch, "requested output shape " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + " does not hold " +
                                        std::to_string(n_cells) + " cells");
  }
  return {rows, cols};
}

void push_bilinear(std::vector<Triplet>& out, std::uint64_t target, double row_f, double col_f,
                   std::uint32_t rows, std::uint32_t cols) {
  const double r0 = std::floor(row_f);
  const double c0 = std::floor(col_f);
  const double tr = row_f - r0;
  const double tc = col_f - c0;
  for (int dr = 0; dr < 2; ++dr) {
    const double r = r0 + dr;
    if (r < 0.0 || r >= rows) continue;
    const double wr = dr ? tr : 1.0 - tr;
    for (int dc = 0; dc < 2; ++dc) {
      const double c = c0 + dc;
      if (c < 0.0 || c >= cols) continue;
      const double w = wr * (dc ? tc : 1.0 - tc);
      if (!(w > 0.0)) continue;
      const auto src = static_cast<std::uint64_t>(r) * cols + static_cast<std::uint64_t>(c);
      out.push_back({target, static_cast<std::uint32_t>(src), w});
    }
  }
}

}  // namespace

PoolingMatrix PoolingMatrix::from_csr(Direction direction, std::uint64_t n_target,
                                      std::uint64_t n_source,
                                      std::vector<std::uint64_t> row_offsets,
                                      std::vector<std::uint32_t> col_indices,
                                      std::vector<float> weights) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, what); };
  if (n_source > std::uint64_t{std::numeric_limits<std::uint32_t>::max()} + 1) {
    bad("n_source exceeds 32-bit column indices");
  }
  if (row_offsets.size() != n_target + 1) bad("row_offsets must have n_target + 1 entries");
  if (col_indices.size() != weights.size()) bad("col_indices and weights differ in length");
  if (row_offsets.front() != 0 || row_offsets.back() != col_indices.size()) {
    bad("row_offsets must start at 0 and end at nnz");
  }
  for (std::uint64_t r = 0; r < n_target; ++r) {
    const auto lo = row_offsets[r], hi = row_offsets[r + 1];
    if (hi < lo) bad("row_offsets must be nondecreasing");
    for (auto k = lo; k < hi; ++k) {
      if (col_indices[k] >= n_source) bad("column index out of range");
      if (k > lo && col_indices[k] <= col_indices[k - 1]) {
        bad("column indices must be strictly increasing within a row");
      }
      if (!std::isfinite(weights[k]) || !(weights[k] > 0.f)) {
        bad("weights must be positive and finite");
      }
    }
  }
  PoolingMatrix m;
  m.direction_ = direction;
  m.n_target_ = n_target;
  m.n_source_ = n_source;
  m.row_offsets_ = std::move(row_offsets);
  m.col_indices_ = std::move(col_indices);
  m.weights_ = std::move(weights);
  return m;
}

PoolingMatrix PoolingMatrix::transposed() const {
  std::vector<std::uint64_t> offsets(n_source_ + 1, 0);
  for (auto c : col_indices_) ++offsets[c + 1];
  for (std::uint64_t i = 0; i < n_source_; ++i) offsets[i + 1] += offsets[i];

  std::vector<std::uint64_t> next(offsets.begin(), offsets.end() - 1);
  std::vector<std::uint32_t> cols(nnz());
  std::vector<float> w(nnz());
  for (std::uint64_t r = 0; r < n_target_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto slot = next[col_indices_[k]]++;
      cols[slot] = static_cast<std::uint32_t>(r);
      w[slot] = weights_[k];
    }
  }
  PoolingMatrix t;
  t.direction_ = direction_ == Direction::kFrontToBev ? Direction::kBevToFront
                                                      : Direction::kFrontToBev;
  t.n_target_ = n_source_;
  t.n_source_ = n_target_;
  t.row_offsets_ = std::move(offsets);
  t.col_indices_ = std::move(cols);
  t.weights_ = std::move(w);
  t.provenance_ = provenance_;
  return t;
}

PoolingMatrix build_pooling_matrix(const PointCloud& cloud, const CalibrationChain& chain,
                                   const ViewSpec& src, const ViewSpec& dst, Kernel kernel) {
  if (src.index() == dst.index()) {
    fail(ErrorCode::kViewMismatch, "pooling needs one front view and one BEV spec");
  }
  const bool front_is_source = std::holds_alternative<FrontViewSpec>(src);
  const auto& front = std::get<FrontViewSpec>(front_is_source ? src : dst);
  const auto& bev = std::get<BevSpec>(front_is_source ? dst : src);
  validate(front);
  validate(bev);

  const std::uint32_t f_cols = front.map_width(), f_rows = front.map_height();
  const std::uint32_t b_cols = bev.map_cols(), b_rows = bev.map_rows();

  std::vector<Triplet> triplets;
  triplets.reserve(cloud.size() * (kernel == Kernel::kBilinear ? 4 : 1));
  std::size_t in_view = 0, paired = 0;

  for (const auto& p : cloud.points) {
    const auto proj = project_point(chain, p.x, p.y, p.z);
    const auto fcell = proj ? front_cell(front, proj->u, proj->v) : std::nullopt;
    if (fcell) ++in_view;
    const auto bcell = bev_cell(bev, p.x, p.y, p.z);
    if (!fcell || !bcell) continue;
    ++paired;

    const std::uint64_t f_flat = fcell->flat(f_cols);
    const std::uint64_t b_flat = bcell->flat(b_cols);
    const std::uint64_t target = front_is_source ? b_flat : f_flat;

    if (kernel == Kernel::kNearest) {
      const std::uint64_t source = front_is_source ? f_flat : b_flat;
      triplets.push_back({target, static_cast<std::uint32_t>(source), 1.0});
    } else if (front_is_source) {
      push_bilinear(triplets, target, proj->v / front.stride - 0.5,
                    proj->u / front.stride - 0.5, f_rows, f_cols);
    } else {
      const double row_f = ((p.x - bev.x_min) / bev.resolution) / bev.stride - 0.5;
      const double col_f = ((p.y - bev.y_min) / bev.resolution) / bev.stride - 0.5;
      push_bilinear(triplets, target, row_f, col_f, b_rows, b_cols);
    }
  }

  // Sorting on the weight too makes duplicate summation order canonical, so
  // the matrix is bit-identical for any permutation of the cloud.
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.weight < b.weight;
  });

  std::vector<Triplet> merged;
  merged.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
      merged.back().weight += t.weight;
    } else {
      merged.push_back(t);
    }
  }

  const std::uint64_t n_target = front_is_source ? bev.cells() : front.cells();
  const std::uint64_t n_source = front_is_source ? front.cells() : bev.cells();

  PoolingMatrix m;
  m.direction_ = front_is_source ? Direction::kFrontToBev : Direction::kBevToFront;
  m.n_target_ = n_target;
  m.n_source_ = n_source;
  m.row_offsets_.assign(n_target + 1, 0);
  m.col_indices_.resize(merged.size());
  m.weights_.resize(merged.size());
  for (const auto& t : merged) ++m.row_offsets_[t.row + 1];
  for (std::uint64_t r = 0; r < n_target; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];

  for (std::uint64_t r = 0; r < n_target; ++r) {
    const auto lo = m.row_offsets_[r], hi = m.row_offsets_[r + 1];
    double sum = 0.0;
    for (auto k = lo; k < hi; ++k) sum += merged[k].weight;
    for (auto k = lo; k < hi; ++k) {
      m.col_indices_[k] = merged[k].col;
      m.weights_[k] = static_cast<float>(merged[k].weight / sum);
    }
  }
  m.points_in_view_ = in_view;
  m.points_paired_ = paired;
  m.provenance_ = Provenance{front, bev, {}};
  return m;
}

template <typename T>
BasicFeatureMap<T> apply_pooling(const PoolingMatrix& m, const BasicFeatureMap<T>& f,
                                 unsigned threads, std::uint32_t out_rows,
                                 std::uint32_t out_cols) {
  if (f.cells() != m.n_source()) {
    fail(ErrorCode::kShapeMismatch, "feature map has " + std::to_string(f.cells()) +
                                        " cells, matrix expects " +
                                        std::to_string(m.n_source()));
  }
  const auto [rows, cols] = output_dims(m.n_target(), out_rows, out_cols);
  BasicFeatureMap<T> out(rows, cols, f.channels);
  spmm_rows<T>(m.row_offsets(), m.col_indices(), m.weights(), f.values.data(), f.channels,
               out.values.data(), m.n_target(), threads);
  return out;
}

template <typename T>
BasicFeatureMap<T> apply_pooling_grad(const PoolingMatrix& m, const BasicFeatureMap<T>& g,
                                      unsigned threads, std::uint32_t out_rows,
                                      std::uint32_t out_cols) {
  if (g.cells() != m.n_target()) {
    fail(ErrorCode::kShapeMismatch, "gradient has " + std::to_string(g.cells()) +
                                        " cells, matrix has " + std::to_string(m.n_target()) +
                                        " rows");
  }
  const auto [rows, cols] = output_dims(m.n_source(), out_rows, out_cols);
  const PoolingMatrix t = m.transposed();
  BasicFeatureMap<T> out(rows, cols, g.channels);
  spmm_rows<T>(t.row_offsets(), t.col_indices(), t.weights(), g.values.data(), g.channels,
               out.values.data(), t.n_target(), threads);
  return out;
}

template FeatureMap apply_pooling(const PoolingMatrix&, const FeatureMap&, unsigned,
                                  std::uint32_t, std::uint32_t);
template FeatureMapD apply_pooling(const PoolingMatrix&, const FeatureMapD&, unsigned,
                                   std::uint32_t, std::uint32_t);
template FeatureMap apply_pooling_grad(const PoolingMatrix&, const FeatureMap&, unsigned,
                                       std::uint32_t, std::uint32_t);
template FeatureMapD apply_pooling_grad(const PoolingMatrix&, const FeatureMapD&, unsigned,
                                        std::uint32_t, std::uint32_t);

void spmm(const PoolingMatrix& m, std::span<const float> in, std::size_t channels,
          std::span<float> out, unsigned threads) {
  if (in.size() != m.n_source() * channels || out.size() != m.n_target() * channels) {
    fail(ErrorCode::kShapeMismatch, "spmm buffer sizes do not match the matrix");
  }
  spmm_rows<float>(m.row_offsets(), m.col_indices(), m.weights(), in.data(), channels,
                   out.data(), m.n_target(), threads);
}

CoverageStats coverage(const PoolingMatrix& m) {
  CoverageStats s;
  s.nnz = m.nnz();
  s.points_in_view = m.points_in_view();
  s.points_paired = m.points_paired();
  if (m.n_source() > 0) {
    std::vector<bool> used(m.n_source(), false);
    std::size_t distinct = 0;
    for (auto c : m.col_indices()) {
      if (!used[c]) {
        used[c] = true;
        ++distinct;
      }
    }
    s.source_cells_used = static_cast<double>(distinct) / static_cast<double>(m.n_source());
  }
  if (m.n_target() > 0) {
    std::size_t nonempty = 0;
    const auto off = m.row_offsets();
    for (std::uint64_t r = 0; r < m.n_target(); ++r) nonempty += off[r + 1] > off[r];
    s.target_cells_used = static_cast<double>(nonempty) / static_cast<double>(m.n_target());
  }
  return s;
}

double max_row_sum_error(const PoolingMatrix& m) {
  double worst = 0.0;
  const auto off = m.row_offsets();
  const auto w = m.weights();
  for (std::uint64_t r = 0; r < m.n_target(); ++r) {
    if (off[r] == off[r + 1]) continue;
    double sum = 0.0;
    for (auto k = off[r]; k < off[r + 1]; ++k) sum += w[k];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

namespace {
constexpr std::size_t kMatrixHeader = 4 + 2 + 1 + 3 * 8;
}

std::vector<std::byte> serialize_matrix(const PoolingMatrix& m) {
  std::vector<std::byte> out;
  out.reserve(kMatrixHeader + m.row_offsets().size_bytes() + m.nnz() * 8 + 4);
  const auto* magic = reinterpret_cast<const std::byte*>(kMatrixMagic);
  out.insert(out.end(), magic, magic + 4);
  detail::append_le(out, kMatrixVersion);
  detail::append_le(out, static_cast<std::uint8_t>(m.direction()));
  detail::append_le(out, m.n_target());
  detail::append_le(out, m.n_source());
  detail::append_le(out, static_cast<std::uint64_t>(m.nnz()));
  detail::append_le_array(out, m.row_offsets());
  detail::append_le_array(out, m.col_indices());
  detail::append_le_array(out, m.weights());
  detail::append_le(out, detail::crc32(out));
  return out;
}

PoolingMatrix deserialize_matrix(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMatrixMagic, 4) != 0) {
    fail(ErrorCode::kBadMagic, "not a pooling matrix (expected magic 'SNHP')");
  }
  if (bytes.size() < kMatrixHeader + 4) fail(ErrorCode::kTruncated, "matrix header is truncated");
  const std::byte* p = bytes.data() + 4;
  const auto version = detail::load_le<std::uint16_t>(p);
  const auto direction = detail::load_le<std::uint8_t>(p + 2);
  const auto n_target = detail::load_le<std::uint64_t>(p + 3);
  const auto n_source = detail::load_le<std::uint64_t>(p + 11);
  const auto nnz = detail::load_le<std::uint64_t>(p + 19);

  // Any count larger than the file itself cannot be satisfied; checking this
  // first also keeps the size arithmetic below from overflowing.
  if (n_target >= bytes.size() || nnz >= bytes.size()) {
    fail(ErrorCode::kTruncated, "matrix counts exceed the file length");
  }
  const std::size_t expected = kMatrixHeader + (n_target + 1) * 8 + nnz * 8 + 4;
  if (bytes.size() != expected) {
    fail(ErrorCode::kTruncated, "matrix file is " + std::to_string(bytes.size()) +
                                    " bytes, header implies " + std::to_string(expected));
  }
  const auto stored_crc = detail::load_le<std::uint32_t>(bytes.data() + expected - 4);
  if (detail::crc32(bytes.first(expected - 4)) != stored_crc) {
    fail(ErrorCode::kChecksumMismatch, "matrix CRC-32 does not match");
  }
  if (version != kMatrixVersion) {
    fail(ErrorCode::kInvalidArgument, "unsupported matrix version " + std::to_string(version));
  }
  if (direction > 1) fail(ErrorCode::kInvalidArgument, "unknown matrix direction tag");

  std::vector<std::uint64_t> offsets(n_target + 1);
  std::vector<std::uint32_t> cols(nnz);
  std::vector<float> weights(nnz);
  const std::byte* q = bytes.data() + kMatrixHeader;
  detail::load_le_array<std::uint64_t>(q, offsets);
  q += offsets.size() * 8;
  detail::load_le_array<std::uint32_t>(q, cols);
  q += nnz * 4;
  detail::load_le_array<float>(q, weights);
  return PoolingMatrix::from_csr(static_cast<Direction>(direction), n_target, n_source,
                                 std::move(offsets), std::move(cols), std::move(weights));
}

void save_matrix(const std::string& path, const PoolingMatrix& m) {
  write_binary_file(path, serialize_matrix(m));
}

PoolingMatrix load_matrix(const std::string& path) {
  return deserialize_matrix(read_binary_file(path));
}

}  // namespace xview
