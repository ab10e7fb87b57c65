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


#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "doctest.h"
#include "support/dense_oracle.hpp"
#include "support/random_instance.hpp"
#include "xview/error.hpp"
#include "xview/sparse_pool.hpp"

using namespace xview;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an xview::Error");
  return ErrorCode::kIo;
}

// LIDAR x forward maps straight to camera depth; u = 10 * (-y) / x + 8,
// v = 10 * (-z) / x + 4 on a 16 x 8 image.
CalibrationChain toy_chain() {
  CalibrationChain c;
  c.P = {8, -10, 0, 0, 4, 0, -10, 0, 1, 0, 0, 0};
  return c;
}

FrontViewSpec toy_front() { return {16, 8, 1}; }

BevSpec toy_bev() {
  BevSpec b;
  b.x_min = 0.0;
  b.x_max = 10.0;
  b.y_min = -5.0;
  b.y_max = 5.0;
  b.z_min = -3.0;
  b.z_max = 3.0;
  b.resolution = 1.0;
  return b;
}

PoolingMatrix csr(std::uint64_t n_target, std::uint64_t n_source,
                  std::vector<std::uint64_t> off, std::vector<std::uint32_t> cols,
                  std::vector<float> w) {
  return PoolingMatrix::from_csr(Direction::kFrontToBev, n_target, n_source, std::move(off),
                                 std::move(cols), std::move(w));
}

FeatureMapD random_map(std::mt19937_64& rng, std::uint32_t cells, std::uint32_t channels) {
  FeatureMapD f(cells, 1, channels);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& v : f.values) v = U(rng);
  return f;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("build: empty cloud gives an empty matrix and a zero result") {
  const auto m = build_pooling_matrix({}, toy_chain(), toy_front(), toy_bev(), Kernel::kNearest);
  CHECK(m.nnz() == 0);
  CHECK(m.n_target() == 100);
  CHECK(m.n_source() == 128);
  FeatureMap f(8, 16, 3);
  std::fill(f.values.begin(), f.values.end(), 1.f);
  const auto b = apply_pooling(m, f);
  CHECK(std::all_of(b.values.begin(), b.values.end(), [](float v) { return v == 0.f; }));
}

TEST_CASE("build: one point pairs its BEV cell with its pixel") {
  PointCloud cloud;
  cloud.points.push_back({5.5f, 1.25f, -0.5f, 0.f});  // u = 5.727, v = 4.909
  const auto m =
      build_pooling_matrix(cloud, toy_chain(), toy_front(), toy_bev(), Kernel::kNearest);
  REQUIRE(m.nnz() == 1);
  const std::uint64_t row = 5 * 10 + 6;
  const std::uint32_t col = 4 * 16 + 5;
  CHECK(m.row_offsets()[row] == 0);
  CHECK(m.row_offsets()[row + 1] == 1);
  CHECK(m.col_indices()[0] == col);
  CHECK(m.weights()[0] == 1.f);
  CHECK(m.direction() == Direction::kFrontToBev);

  const auto back =
      build_pooling_matrix(cloud, toy_chain(), toy_bev(), toy_front(), Kernel::kNearest);
  CHECK(back.direction() == Direction::kBevToFront);
  REQUIRE(back.nnz() == 1);
  CHECK(back.col_indices()[0] == row);
}

TEST_CASE("build: two points sharing a BEV cell split its row evenly") {
  PointCloud cloud;
  cloud.points.push_back({5.2f, 1.2f, -0.5f, 0.f});
  cloud.points.push_back({5.8f, 1.8f, 0.5f, 0.f});
  cloud.points.push_back({2.5f, -0.5f, 0.f, 0.f});
  const auto m =
      build_pooling_matrix(cloud, toy_chain(), toy_front(), toy_bev(), Kernel::kNearest);
  const std::uint64_t row = 5 * 10 + 6;
  REQUIRE(m.row_offsets()[row + 1] - m.row_offsets()[row] == 2);
  CHECK(m.weights()[m.row_offsets()[row]] == 0.5f);
  CHECK(m.weights()[m.row_offsets()[row] + 1] == 0.5f);
  CHECK(m.nnz() == 3);

  const auto dense = testing::dense_pooling(cloud.points, toy_chain().P, toy_front(), toy_bev(),
                                            true, false);
  for (std::uint64_t r = 0; r < m.n_target(); ++r)
    for (auto k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k)
      CHECK(dense(r, m.col_indices()[k]) == doctest::Approx(m.weights()[k]));
}

TEST_CASE("build: points seen by one view only are counted but not paired") {
  PointCloud cloud;
  cloud.points.push_back({5.5f, 1.25f, -0.5f, 0.f});  // both views
  cloud.points.push_back({5.5f, 1.25f, -2.9f, 0.f});  // in the BEV volume, below the image
  cloud.points.push_back({12.f, 0.f, 0.f, 0.f});      // in the image, beyond x_max
  cloud.points.push_back({-3.f, 0.f, 0.f, 0.f});      // behind the camera
  const auto m =
      build_pooling_matrix(cloud, toy_chain(), toy_front(), toy_bev(), Kernel::kNearest);
  const auto s = coverage(m);
  CHECK(s.points_in_view == 2);
  CHECK(s.points_paired == 1);
  CHECK(s.nnz == 1);
}

TEST_CASE("build: two specs of the same kind are a view mismatch") {
  CHECK(code_of([] {
          build_pooling_matrix({}, toy_chain(), toy_front(), toy_front(), Kernel::kNearest);
        }) == ErrorCode::kViewMismatch);
  CHECK(code_of([] {
          build_pooling_matrix({}, toy_chain(), toy_bev(), toy_bev(), Kernel::kBilinear);
        }) == ErrorCode::kViewMismatch);
}

TEST_CASE("build: bilinear spreads a point over its four source neighbours") {
  PointCloud cloud;
  // u = 10 * 0.25 / 5 + 8 = 8.5, v = 10 * 0.125 / 5 + 4 = 4.25.
  cloud.points.push_back({5.f, -0.25f, -0.125f, 0.f});
  const auto m =
      build_pooling_matrix(cloud, toy_chain(), toy_front(), toy_bev(), Kernel::kBilinear);
  // Continuous cell coordinates (v - 0.5, u - 0.5) = (3.75, 8.0): rows 3 and 4
  // with weights 0.25 / 0.75, column 8 only (column 9 has weight 0).
  REQUIRE(m.nnz() == 2);
  CHECK(m.col_indices()[0] == 3 * 16 + 8);
  CHECK(m.col_indices()[1] == 4 * 16 + 8);
  CHECK(m.weights()[0] == doctest::Approx(0.25));
  CHECK(m.weights()[1] == doctest::Approx(0.75));
}

TEST_CASE("build: bilinear drops neighbours outside the source map") {
  PointCloud cloud;
  cloud.points.push_back({5.f, 3.9f, 1.95f, 0.f});  // u = 0.2, v = 0.1: top-left corner
  const auto m =
      build_pooling_matrix(cloud, toy_chain(), toy_front(), toy_bev(), Kernel::kBilinear);
  REQUIRE(m.nnz() == 1);
  CHECK(m.col_indices()[0] == 0);
  CHECK(m.weights()[0] == 1.f);
}

TEST_CASE("apply: selection and averaging") {
  SUBCASE("single entry selects a source row") {
    std::vector<std::uint64_t> off(11, 0);
    for (int r = 6; r <= 10; ++r) off[r] = 1;
    const auto m = csr(10, 10, off, {7}, {1.f});
    FeatureMap f(10, 1, 3);
    f.at(7, 0) = 1.f;
    f.at(7, 1) = 2.f;
    f.at(7, 2) = 3.f;
    f.at(2, 0) = 9.f;
    const auto b = apply_pooling(m, f);
    CHECK(b.at(5, 0) == 1.f);
    CHECK(b.at(5, 1) == 2.f);
    CHECK(b.at(5, 2) == 3.f);
    CHECK(std::accumulate(b.values.begin(), b.values.end(), 0.f) == 6.f);

    FeatureMap g(10, 1, 3);
    std::fill(g.values.begin() + 15, g.values.begin() + 18, 1.f);
    const auto t = apply_pooling_grad(m, g);
    CHECK(t.at(7, 0) == 1.f);
    CHECK(t.at(7, 2) == 1.f);
    CHECK(std::accumulate(t.values.begin(), t.values.end(), 0.f) == 3.f);
  }
  SUBCASE("half and half") {
    const auto m = csr(1, 2, {0, 2}, {0, 1}, {0.5f, 0.5f});
    FeatureMap f(2, 1, 1);
    f.values = {2.f, 4.f};
    CHECK(apply_pooling(m, f).values[0] == 3.f);
  }
  SUBCASE("shape mismatch") {
    const auto m = csr(1, 2, {0, 2}, {0, 1}, {0.5f, 0.5f});
    CHECK(code_of([&] { apply_pooling(m, FeatureMap(3, 1, 1)); }) == ErrorCode::kShapeMismatch);
    CHECK(code_of([&] { apply_pooling_grad(m, FeatureMap(2, 1, 1)); }) ==
          ErrorCode::kShapeMismatch);
    CHECK(code_of([&] { apply_pooling(m, FeatureMap(2, 1, 1), 1, 2, 2); }) ==
          ErrorCode::kShapeMismatch);
    std::vector<float> in(4), out(1);
    CHECK(code_of([&] { spmm(m, in, 1, out); }) == ErrorCode::kShapeMismatch);
  }
}

TEST_CASE("apply: random 40 x 60 matrix against a dense product") {
  std::mt19937_64 rng(40);
  std::bernoulli_distribution keep(0.15);
  std::uniform_real_distribution<double> W(0.1, 1.0);
  std::vector<std::uint64_t> off{0};
  std::vector<std::uint32_t> cols;
  std::vector<float> w;
  testing::DenseMatrix dense{40, 60, std::vector<double>(2400, 0.0)};
  for (std::uint32_t r = 0; r < 40; ++r) {
    for (std::uint32_t c = 0; c < 60; ++c) {
      if (!keep(rng)) continue;
      cols.push_back(c);
      w.push_back(static_cast<float>(W(rng)));
      dense(r, c) = w.back();
    }
    off.push_back(cols.size());
  }
  const auto m = csr(40, 60, off, cols, w);
  const auto f = random_map(rng, 60, 5);
  const auto b = apply_pooling(m, f, 1, 8, 5);
  CHECK(b.rows == 8);
  CHECK(b.cols == 5);
  const auto ref = testing::dense_matmul(dense, f.values, 5);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::abs(b.values[i] - ref[i]) <= 1e-5 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("properties on random scenes") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto in = testing::random_instance(rng, 100, 24);
    const bool bilinear = trial % 2 == 1;
    const bool f2b = trial % 4 < 2;
    const Kernel kernel = bilinear ? Kernel::kBilinear : Kernel::kNearest;
    const ViewSpec src = f2b ? ViewSpec{in.front} : ViewSpec{in.bev};
    const ViewSpec dst = f2b ? ViewSpec{in.bev} : ViewSpec{in.front};
    CAPTURE(trial);
    const auto m = build_pooling_matrix(in.cloud, in.chain, src, dst, kernel);

    // Row sums and structure.
    CHECK(max_row_sum_error(m) <= 1e-6);
    CHECK_NOTHROW(PoolingMatrix::from_csr(
        m.direction(), m.n_target(), m.n_source(),
        {m.row_offsets().begin(), m.row_offsets().end()},
        {m.col_indices().begin(), m.col_indices().end()},
        {m.weights().begin(), m.weights().end()}));
    CHECK(m.nnz() <= (bilinear ? 4 : 1) * coverage(m).points_paired);

    // Dense oracle.
    const auto dense =
        testing::dense_pooling(in.cloud.points, in.chain.P, in.front, in.bev, f2b, bilinear);
    REQUIRE(dense.rows == m.n_target());
    REQUIRE(dense.cols == m.n_source());
    const auto f = random_map(rng, static_cast<std::uint32_t>(m.n_source()), 3);
    const auto b = apply_pooling(m, f);
    const auto ref = testing::dense_matmul(dense, f.values, 3);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(b.values[i] - ref[i]) / std::max(1.0, std::abs(ref[i])));
    }
    CHECK(worst <= 1e-5);

    // Adjoint identity.
    const auto g = random_map(rng, static_cast<std::uint32_t>(m.n_target()), 3);
    const auto t = apply_pooling_grad(m, g);
    const double lhs = dot(b.values, g.values), rhs = dot(f.values, t.values);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(lhs)));

    // Linearity.
    const auto f2 = random_map(rng, static_cast<std::uint32_t>(m.n_source()), 3);
    FeatureMapD mix = f;
    for (std::size_t i = 0; i < mix.values.size(); ++i)
      mix.values[i] = 2.5 * f.values[i] - 0.75 * f2.values[i];
    const auto bm = apply_pooling(m, mix);
    const auto b2 = apply_pooling(m, f2);
    for (std::size_t i = 0; i < bm.values.size(); ++i)
      CHECK(std::abs(bm.values[i] - (2.5 * b.values[i] - 0.75 * b2.values[i])) <= 1e-6);

    // Point order.
    auto shuffled = in.cloud;
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    CHECK(build_pooling_matrix(shuffled, in.chain, src, dst, kernel) == m);

    // Thread count.
    CHECK(apply_pooling(m, f, 4).values == b.values);
  }
}

TEST_CASE("direction symmetry: nearest patterns are transposes") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = testing::random_instance(rng, 200, 16);
    const auto fb = build_pooling_matrix(in.cloud, in.chain, in.front, in.bev, Kernel::kNearest);
    const auto bf = build_pooling_matrix(in.cloud, in.chain, in.bev, in.front, Kernel::kNearest);
    const auto t = fb.transposed();
    CHECK(t.direction() == bf.direction());
    CHECK(std::equal(t.row_offsets().begin(), t.row_offsets().end(), bf.row_offsets().begin(),
                     bf.row_offsets().end()));
    CHECK(std::equal(t.col_indices().begin(), t.col_indices().end(), bf.col_indices().begin(),
                     bf.col_indices().end()));
  }
}

TEST_CASE("gradient: central finite differences") {
  std::mt19937_64 rng(5);
  const auto in = testing::random_instance(rng, 100, 12);
  const auto m = build_pooling_matrix(in.cloud, in.chain, in.front, in.bev, Kernel::kBilinear);
  const auto f = random_map(rng, static_cast<std::uint32_t>(m.n_source()), 2);
  const auto g = random_map(rng, static_cast<std::uint32_t>(m.n_target()), 2);
  const auto grad = apply_pooling_grad(m, g);
  const double eps = 1e-3;
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    auto plus = f, minus = f;
    plus.values[j] += eps;
    minus.values[j] -= eps;
    const double fd =
        (dot(apply_pooling(m, plus).values, g.values) - dot(apply_pooling(m, minus).values, g.values)) /
        (2 * eps);
    CHECK(std::abs(fd - grad.values[j]) <= 1e-4 * std::max(1.0, std::abs(grad.values[j])));
  }
}

TEST_CASE("coverage counts") {
  CHECK(coverage(PoolingMatrix{}).source_cells_used == 0.0);
  std::vector<std::uint64_t> off(101, 0);
  for (int r = 4; r <= 100; ++r) off[r] = 1;
  const auto s = coverage(csr(100, 100, off, {42}, {1.f}));
  CHECK(s.source_cells_used == 0.01);
  CHECK(s.target_cells_used == 0.01);
  CHECK(s.nnz == 1);
  const auto e = coverage(csr(100, 100, std::vector<std::uint64_t>(101, 0), {}, {}));
  CHECK(e.source_cells_used == 0.0);
  CHECK(e.target_cells_used == 0.0);
}

TEST_CASE("from_csr rejects malformed structure") {
  CHECK(code_of([] { csr(2, 3, {0, 1}, {0}, {1.f}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(1, 3, {0, 2}, {1, 1}, {.5f, .5f}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(1, 3, {0, 2}, {2, 1}, {.5f, .5f}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(1, 3, {0, 1}, {3}, {1.f}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(1, 3, {0, 1}, {0}, {0.f}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(1, 3, {0, 1}, {0}, {NAN}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { csr(2, 3, {0, 2, 1}, {0}, {1.f}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("matrix files: round trip and damage") {
  std::mt19937_64 rng(77);
  const auto in = testing::random_instance(rng, 300, 20);
  const auto m = build_pooling_matrix(in.cloud, in.chain, in.front, in.bev, Kernel::kBilinear);
  REQUIRE(m.nnz() > 0);
  const auto bytes = serialize_matrix(m);
  CHECK(bytes.size() == 31 + (m.n_target() + 1) * 8 + m.nnz() * 8 + 4);
  CHECK(std::memcmp(bytes.data(), "SNHP", 4) == 0);
  CHECK(deserialize_matrix(bytes) == m);
  CHECK(serialize_matrix(deserialize_matrix(bytes)) == bytes);

  const auto empty = csr(3, 4, {0, 0, 0, 0}, {}, {});
  CHECK(deserialize_matrix(serialize_matrix(empty)) == empty);
  CHECK(deserialize_matrix(serialize_matrix(PoolingMatrix{})) == PoolingMatrix{});

  SUBCASE("bad magic") {
    auto b = bytes;
    b[0] = std::byte{'X'};
    CHECK(code_of([&] { deserialize_matrix(b); }) == ErrorCode::kBadMagic);
    CHECK(code_of([] { deserialize_matrix({}); }) == ErrorCode::kBadMagic);
  }
  SUBCASE("corrupted length field") {
    auto b = bytes;
    b[23] = static_cast<std::byte>(static_cast<unsigned>(b[23]) + 1);  // nnz low byte
    CHECK(code_of([&] { deserialize_matrix(b); }) == ErrorCode::kTruncated);
    b = bytes;
    b[30] = std::byte{0x7f};  // nnz high byte
    CHECK(code_of([&] { deserialize_matrix(b); }) == ErrorCode::kTruncated);
  }
  SUBCASE("cut short") {
    const std::span<const std::byte> all(bytes);
    CHECK(code_of([&] { deserialize_matrix(all.first(bytes.size() - 1)); }) ==
          ErrorCode::kTruncated);
    CHECK(code_of([&] { deserialize_matrix(all.first(10)); }) == ErrorCode::kTruncated);
  }
  SUBCASE("flipped payload bit") {
    auto b = bytes;
    b[b.size() - 6] ^= std::byte{0x01};
    CHECK(code_of([&] { deserialize_matrix(b); }) == ErrorCode::kChecksumMismatch);
  }
}

TEST_CASE("transpose of a transpose is the original") {
  std::mt19937_64 rng(8);
  const auto in = testing::random_instance(rng, 300, 20);
  const auto m = build_pooling_matrix(in.cloud, in.chain, in.bev, in.front, Kernel::kBilinear);
  CHECK(m.transposed().transposed() == m);
}
