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


#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/paths.hpp"
#include "support/random_instance.hpp"
#include "xview/error.hpp"
#include "xview/sparse_pool.hpp"
#include "xview/xview.h"

namespace {

static_assert(static_cast<int>(XV_ERR_MISSING_KEY) ==
              static_cast<int>(xview::ErrorCode::kMissingKey));
static_assert(static_cast<int>(XV_ERR_IO) == static_cast<int>(xview::ErrorCode::kIo));
static_assert(static_cast<int>(XV_ERR_CHECKSUM_MISMATCH) ==
              static_cast<int>(xview::ErrorCode::kChecksumMismatch));

struct Matrix {
  xv_matrix* p = nullptr;
  ~Matrix() { xv_matrix_free(p); }
};
struct Calib {
  xv_calib* p = nullptr;
  ~Calib() { xv_calib_free(p); }
};
struct Cloud {
  xv_cloud* p = nullptr;
  ~Cloud() { xv_cloud_free(p); }
};
struct Grid {
  xv_grid* p = nullptr;
  ~Grid() { xv_grid_free(p); }
};
struct Buffer {
  xv_buffer b{nullptr, 0};
  ~Buffer() { xv_buffer_free(&b); }
};

}  // namespace

TEST_CASE("c api: names and error reporting") {
  CHECK(std::string(xv_version()) == "1.0.0");
  CHECK(std::string(xv_status_name(XV_OK)) == "Ok");
  CHECK(std::string(xv_status_name(XV_ERR_SHAPE_MISMATCH)) == "ShapeMismatch");
  CHECK(std::string(xv_status_name(XV_ERR_TRUNCATED)) == "Truncated");

  Calib c;
  CHECK(xv_calib_parse(nullptr, 0, &c.p) == XV_ERR_NULL_POINTER);
  const std::string text = "P2: 1 0 0 0 0 1 0 0 0 0 1 0\n";
  CHECK(xv_calib_parse(text.data(), text.size(), &c.p) == XV_ERR_MISSING_KEY);
  CHECK(c.p == nullptr);
  CHECK(std::string(xv_last_error()).find("R0_rect") != std::string::npos);
  CHECK(xv_calib_load("/nonexistent/calib.txt", &c.p) == XV_ERR_IO);
}

TEST_CASE("c api: golden frame through the shared library equals the core build") {
  const std::string calib_path = xview::testing::data_path("kitti/calib/000000.txt");
  const std::string cloud_path = xview::testing::data_path("kitti/velodyne/000000.bin");
  Calib c;
  Cloud pc;
  REQUIRE(xv_calib_load(calib_path.c_str(), &c.p) == XV_OK);
  REQUIRE(xv_cloud_load(cloud_path.c_str(), &pc.p) == XV_OK);
  CHECK(xv_cloud_size(pc.p) == 300);

  double P[12];
  REQUIRE(xv_calib_projection(c.p, P) == XV_OK);
  const auto raw = xview::load_calibration(calib_path);
  const auto chain = xview::compose_chain(raw);
  CHECK(std::memcmp(P, chain.P.data(), sizeof P) == 0);

  Buffer text;
  REQUIRE(xv_calib_format(c.p, &text.b) == XV_OK);
  CHECK(std::string(reinterpret_cast<const char*>(text.b.data), text.b.size) ==
        xview::read_text_file(calib_path));

  const xv_front_spec front = xv_front_spec_default();
  xv_bev_spec bev = xv_bev_spec_default();
  for (xv_kernel k : {XV_NEAREST, XV_BILINEAR}) {
    for (xv_direction d : {XV_FV2BEV, XV_BEV2FV}) {
      Matrix m;
      REQUIRE(xv_matrix_build(pc.p, c.p, &front, &bev, d, k, &m.p) == XV_OK);
      Buffer bytes;
      REQUIRE(xv_matrix_serialize(m.p, &bytes.b) == XV_OK);

      const auto cloud = xview::load_point_cloud(cloud_path);
      const xview::ViewSpec f = xview::FrontViewSpec{}, b = xview::BevSpec{};
      const auto ref = xview::build_pooling_matrix(
          cloud, chain, d == XV_FV2BEV ? f : b, d == XV_FV2BEV ? b : f,
          k == XV_NEAREST ? xview::Kernel::kNearest : xview::Kernel::kBilinear);
      const auto ref_bytes = xview::serialize_matrix(ref);
      REQUIRE(bytes.b.size == ref_bytes.size());
      CHECK(std::memcmp(bytes.b.data, ref_bytes.data(), bytes.b.size) == 0);

      xv_coverage cov{};
      REQUIRE(xv_matrix_coverage(m.p, &cov) == XV_OK);
      CHECK(cov.points_in_view == 255);
      CHECK(cov.points_paired == 255);
    }
  }
}

TEST_CASE("c api: apply, gradient and shape checks") {
  std::mt19937_64 rng(12);
  const auto in = xview::testing::random_instance(rng, 100, 12);
  const auto ref = xview::build_pooling_matrix(in.cloud, in.chain, in.front, in.bev,
                                               xview::Kernel::kBilinear);
  Matrix m;
  REQUIRE(xv_matrix_from_csr(XV_FV2BEV, ref.n_target(), ref.n_source(), ref.row_offsets().data(),
                             ref.col_indices().data(), ref.weights().data(), ref.nnz(),
                             &m.p) == XV_OK);
  xv_matrix_info info{};
  REQUIRE(xv_matrix_info_get(m.p, &info) == XV_OK);
  CHECK(info.nnz == ref.nnz());
  CHECK(info.direction == XV_FV2BEV);

  const std::size_t ch = 3;
  std::vector<float> f(ref.n_source() * ch), out(ref.n_target() * ch);
  std::uniform_real_distribution<float> U(-1.f, 1.f);
  for (auto& v : f) v = U(rng);
  REQUIRE(xv_matrix_apply(m.p, f.data(), ref.n_source(), ch, out.data(), ref.n_target(), 1) ==
          XV_OK);
  xview::FeatureMap fm(static_cast<std::uint32_t>(ref.n_source()), 1, ch);
  fm.values = f;
  CHECK(out == xview::apply_pooling(ref, fm).values);

  std::vector<float> grad(ref.n_source() * ch);
  REQUIRE(xv_matrix_apply_grad(m.p, out.data(), ref.n_target(), ch, grad.data(), ref.n_source(),
                               0) == XV_OK);

  CHECK(xv_matrix_apply(m.p, f.data(), ref.n_source() + 1, ch, out.data(), ref.n_target(), 1) ==
        XV_ERR_SHAPE_MISMATCH);
  CHECK(xv_matrix_apply(m.p, nullptr, ref.n_source(), ch, out.data(), ref.n_target(), 1) ==
        XV_ERR_NULL_POINTER);

  Grid g, pooled;
  REQUIRE(xv_grid_create(static_cast<std::uint32_t>(ref.n_source()), 1, ch, &g.p) == XV_OK);
  std::memcpy(xv_grid_data(g.p), f.data(), f.size() * sizeof(float));
  CHECK(xv_matrix_pool_grid(m.p, g.p, 3, 3, 1, &pooled.p) == XV_ERR_SHAPE_MISMATCH);
  REQUIRE(xv_matrix_pool_grid(m.p, g.p, 0, 0, 1, &pooled.p) == XV_OK);
  std::uint32_t r = 0, c = 0, k = 0;
  xv_grid_dims(pooled.p, &r, &c, &k);
  CHECK(r == ref.n_target());
  CHECK(c == 1);
  CHECK(k == ch);

  const std::uint64_t bad_offsets[2] = {0, 1};
  const std::uint32_t bad_cols[1] = {99999};
  const float bad_w[1] = {1.f};
  Matrix bad;
  CHECK(xv_matrix_from_csr(XV_FV2BEV, 1, 10, bad_offsets, bad_cols, bad_w, 1, &bad.p) ==
        XV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: file decoding errors") {
  const std::uint64_t off[2] = {0, 1};
  const std::uint32_t cols[1] = {0};
  const float w[1] = {1.f};
  Matrix m;
  REQUIRE(xv_matrix_from_csr(XV_BEV2FV, 1, 1, off, cols, w, 1, &m.p) == XV_OK);
  Buffer bytes;
  REQUIRE(xv_matrix_serialize(m.p, &bytes.b) == XV_OK);
  std::vector<std::uint8_t> b(bytes.b.data, bytes.b.data + bytes.b.size);
  Matrix back;
  REQUIRE(xv_matrix_from_bytes(b.data(), b.size(), &back.p) == XV_OK);
  xv_matrix_info info{};
  xv_matrix_info_get(back.p, &info);
  CHECK(info.direction == XV_BEV2FV);

  b[b.size() - 5] ^= 0x10;
  Matrix damaged;
  CHECK(xv_matrix_from_bytes(b.data(), b.size(), &damaged.p) == XV_ERR_CHECKSUM_MISMATCH);
  CHECK(xv_matrix_from_bytes(b.data(), b.size() - 1, &damaged.p) == XV_ERR_TRUNCATED);
  b[0] = 'Z';
  CHECK(xv_matrix_from_bytes(b.data(), b.size(), &damaged.p) == XV_ERR_BAD_MAGIC);

  Grid g;
  CHECK(xv_grid_from_bytes("nope", 4, &g.p) == XV_ERR_BAD_MAGIC);
  const float bad_point[4] = {1.f, 2.f, 3.f, 0.5f};
  Cloud pc;
  CHECK(xv_cloud_from_bytes(bad_point, 15, &pc.p) == XV_ERR_TRUNCATED_RECORD);
  REQUIRE(xv_cloud_from_points(bad_point, 1, &pc.p) == XV_OK);
  float copy[4] = {};
  CHECK(xv_cloud_copy_points(pc.p, copy, 1) == 1);
  CHECK(copy[2] == 3.f);
}

TEST_CASE("c api: encode, render and detection math") {
  Cloud pc;
  REQUIRE(xv_cloud_simulate(1, &pc.p) == XV_OK);
  CHECK(xv_cloud_size(pc.p) > 50000);
  const xv_bev_spec spec = xv_bev_spec_default();
  Grid g;
  REQUIRE(xv_encode_bev(pc.p, &spec, 7, 0.0, &g.p) == XV_OK);
  std::uint32_t r = 0, c = 0, k = 0;
  xv_grid_dims(g.p, &r, &c, &k);
  CHECK(r == 600);
  CHECK(k == 9);
  Buffer img;
  REQUIRE(xv_render_pgm(g.p, 0, &img.b) == XV_OK);
  CHECK(img.b.size == std::string("P5\n600 600\n255\n").size() + 360000);
  CHECK(xv_render_pgm(g.p, 9, &img.b) == XV_ERR_CHANNEL_OUT_OF_RANGE);

  const double p[3] = {0.5, 0.3, 0.2};
  double loss = 0.0;
  REQUIRE(xv_focal_loss(p, 3, 0, 2.0, 1.0, &loss) == XV_OK);
  CHECK(loss == doctest::Approx(0.25 * -std::log(0.5)));
  const double q[2] = {0.5, 0.6};
  CHECK(xv_focal_loss(q, 2, 0, 2.0, 1.0, &loss) == XV_ERR_INVALID_DISTRIBUTION);
  CHECK(xv_adaptive_negative_loss(1.0, 0.0, 2.0, &loss) == XV_ERR_INVALID_ARGUMENT);
  CHECK(xv_smooth_l1(2.0) == 1.5);

  xv_bev_spec small = spec;
  small.stride = 100;
  const double sizes[2] = {3.9, 1.6};
  const double yaws[2] = {0.0, 1.0};
  const std::size_t n = xv_anchor_count(&small, 1, 2);
  CHECK(n == 72);
  std::vector<xv_box> anchors(n);
  std::size_t written = 0;
  REQUIRE(xv_generate_anchors(&small, sizes, 1, yaws, 2, anchors.data(), n, &written) == XV_OK);
  CHECK(written == n);
  CHECK(xv_generate_anchors(&small, sizes, 1, yaws, 2, anchors.data(), n - 1, &written) ==
        XV_ERR_SHAPE_MISMATCH);
  const xv_box gt{anchors[0].cx, anchors[0].cy, 4.0, 1.7, 0.3};
  std::vector<xv_anchor_match> matches(n);
  const xv_match_config cfg = xv_match_config_default();
  REQUIRE(xv_match_anchors(anchors.data(), n, &gt, 1, &cfg, matches.data()) == XV_OK);
  CHECK(matches[0].label == XV_POSITIVE);
  CHECK(matches[0].gt == 0);
  CHECK(matches[0].dl == doctest::Approx(std::log(4.0 / 3.9)));
  CHECK(matches[2].label == XV_NEGATIVE);
}
