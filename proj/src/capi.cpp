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
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "xview/bev_encoder.hpp"
#include "xview/calib_io.hpp"
#include "xview/detection_math.hpp"
#include "xview/error.hpp"
#include "xview/render.hpp"
#include "xview/sparse_pool.hpp"
#include "xview/synthetic.hpp"
#include "xview/xview.h"

struct xv_calib {
  std::optional<xview::RawCalibration> raw;
  xview::CalibrationChain chain;
};

struct xv_cloud {
  xview::PointCloud cloud;
};

struct xv_grid {
  xview::FeatureMap map;
};

struct xv_matrix {
  xview::PoolingMatrix m;
};

namespace {

thread_local std::string g_last_error;

xv_status set_error(xv_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs `fn` and converts exceptions to status codes.
template <typename Fn>
xv_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return XV_OK;
  } catch (const xview::Error& e) {
    return set_error(static_cast<xv_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(XV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(XV_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(XV_ERR_INTERNAL, "unknown error");
  }
}

#define XV_REQUIRE(ptr)                                                 \
  do {                                                                  \
    if ((ptr) == nullptr)                                               \
      return set_error(XV_ERR_NULL_POINTER, #ptr " must not be null");  \
  } while (0)

xview::FrontViewSpec to_cpp(const xv_front_spec& s) {
  return {s.width_px, s.height_px, s.stride};
}

xview::BevSpec to_cpp(const xv_bev_spec& s) {
  return {s.x_min, s.x_max, s.y_min, s.y_max, s.z_min, s.z_max, s.resolution, s.stride};
}

xview::BevBox to_cpp(const xv_box& b) { return {b.cx, b.cy, b.length, b.width, b.yaw}; }

void to_buffer(const void* data, std::size_t size, xv_buffer* out) {
  out->data = static_cast<std::uint8_t*>(std::malloc(size == 0 ? 1 : size));
  if (out->data == nullptr) throw std::bad_alloc();
  if (size > 0) std::memcpy(out->data, data, size);
  out->size = size;
}

void check_channels(std::size_t channels) {
  if (channels > UINT32_MAX) xview::fail(xview::ErrorCode::kShapeMismatch, "too many channels");
}

}  // namespace

extern "C" {

const char* xv_version(void) { return "1.0.0"; }

const char* xv_status_name(xv_status status) {
  switch (status) {
    case XV_OK: return "Ok";
    case XV_ERR_NULL_POINTER: return "NullPointer";
    case XV_ERR_INTERNAL: return "Internal";
    default: break;
  }
  if (status >= XV_ERR_MISSING_KEY && status <= XV_ERR_IO) {
    return xview::error_code_name(static_cast<xview::ErrorCode>(status)).data();
  }
  return "Unknown";
}

const char* xv_last_error(void) { return g_last_error.c_str(); }

void xv_buffer_free(xv_buffer* buffer) {
  if (buffer == nullptr) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->size = 0;
}

// ---- calibration

xv_status xv_calib_parse(const char* text, size_t length, xv_calib** out) {
  XV_REQUIRE(text);
  XV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<xv_calib>();
    c->raw = xview::parse_calibration(std::string_view(text, length));
    c->chain = xview::compose_chain(*c->raw);
    *out = c.release();
  });
}

xv_status xv_calib_load(const char* path, xv_calib** out) {
  XV_REQUIRE(path);
  XV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<xv_calib>();
    c->raw = xview::load_calibration(path);
    c->chain = xview::compose_chain(*c->raw);
    *out = c.release();
  });
}

xv_status xv_calib_from_projection(const double projection[12], xv_calib** out) {
  XV_REQUIRE(projection);
  XV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<xv_calib>();
    for (int i = 0; i < 12; ++i) {
      if (!std::isfinite(projection[i])) {
        xview::fail(xview::ErrorCode::kNonFiniteValue, "projection has a non-finite entry");
      }
      c->chain.P[i] = projection[i];
    }
    *out = c.release();
  });
}

void xv_calib_free(xv_calib* calib) { delete calib; }

xv_status xv_calib_projection(const xv_calib* calib, double projection[12]) {
  XV_REQUIRE(calib);
  XV_REQUIRE(projection);
  std::memcpy(projection, calib->chain.P.data(), sizeof(double) * 12);
  return XV_OK;
}

xv_status xv_calib_format(const xv_calib* calib, xv_buffer* out) {
  XV_REQUIRE(calib);
  XV_REQUIRE(out);
  return guarded([&] {
    if (!calib->raw) {
      xview::fail(xview::ErrorCode::kInvalidArgument,
                  "calibration was built from a projection and has no KITTI form");
    }
    const std::string text = xview::format_calibration(*calib->raw);
    to_buffer(text.data(), text.size(), out);
  });
}

const char* xv_reference_calibration_text(void) {
  return xview::reference_calibration_text().data();
}

// ---- point clouds

xv_status xv_cloud_from_bytes(const void* data, size_t size, xv_cloud** out) {
  XV_REQUIRE(out);
  if (size > 0) XV_REQUIRE(data);
  return guarded([&] {
    auto c = std::make_unique<xv_cloud>();
    c->cloud = xview::read_point_cloud({static_cast<const std::byte*>(data), size});
    *out = c.release();
  });
}

xv_status xv_cloud_load(const char* path, xv_cloud** out) {
  XV_REQUIRE(path);
  XV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<xv_cloud>();
    c->cloud = xview::load_point_cloud(path);
    *out = c.release();
  });
}

xv_status xv_cloud_from_points(const float* xyzr, size_t count, xv_cloud** out) {
  XV_REQUIRE(out);
  if (count > 0) XV_REQUIRE(xyzr);
  return xv_cloud_from_bytes(xyzr, count * 4 * sizeof(float), out);
}

xv_status xv_cloud_simulate(uint64_t seed, xv_cloud** out) {
  XV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<xv_cloud>();
    c->cloud = xview::simulate_scan(seed);
    *out = c.release();
  });
}

void xv_cloud_free(xv_cloud* cloud) { delete cloud; }

size_t xv_cloud_size(const xv_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

size_t xv_cloud_clamped_count(const xv_cloud* cloud) {
  return cloud ? cloud->cloud.clamped_reflectance : 0;
}

size_t xv_cloud_copy_points(const xv_cloud* cloud, float* xyzr, size_t capacity) {
  if (cloud == nullptr || xyzr == nullptr) return 0;
  const size_t n = std::min(capacity, cloud->cloud.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& p = cloud->cloud.points[i];
    xyzr[4 * i + 0] = p.x;
    xyzr[4 * i + 1] = p.y;
    xyzr[4 * i + 2] = p.z;
    xyzr[4 * i + 3] = p.r;
  }
  return n;
}

xv_status xv_cloud_save(const xv_cloud* cloud, const char* path) {
  XV_REQUIRE(cloud);
  XV_REQUIRE(path);
  return guarded([&] { xview::write_binary_file(path, xview::write_point_cloud(cloud->cloud)); });
}

// ---- view specs

xv_front_spec xv_front_spec_default(void) {
  const xview::FrontViewSpec s;
  return {s.width_px, s.height_px, s.stride};
}

xv_bev_spec xv_bev_spec_default(void) {
  const xview::BevSpec s;
  return {s.x_min, s.x_max, s.y_min, s.y_max, s.z_min, s.z_max, s.resolution, s.stride};
}

void xv_front_spec_dims(const xv_front_spec* spec, uint32_t* rows, uint32_t* cols) {
  if (spec == nullptr || spec->stride == 0) return;
  const auto s = to_cpp(*spec);
  if (rows) *rows = s.map_height();
  if (cols) *cols = s.map_width();
}

void xv_bev_spec_dims(const xv_bev_spec* spec, uint32_t* rows, uint32_t* cols) {
  if (spec == nullptr || spec->stride == 0 || !(spec->resolution > 0.0)) return;
  const auto s = to_cpp(*spec);
  if (rows) *rows = s.map_rows();
  if (cols) *cols = s.map_cols();
}

// ---- feature grids

xv_status xv_grid_create(uint32_t rows, uint32_t cols, uint32_t channels, xv_grid** out) {
  XV_REQUIRE(out);
  return guarded([&] { *out = new xv_grid{xview::FeatureMap(rows, cols, channels)}; });
}

xv_status xv_grid_load(const char* path, xv_grid** out) {
  XV_REQUIRE(path);
  XV_REQUIRE(out);
  return guarded([&] { *out = new xv_grid{xview::load_grid(path)}; });
}

xv_status xv_grid_from_bytes(const void* data, size_t size, xv_grid** out) {
  XV_REQUIRE(out);
  if (size > 0) XV_REQUIRE(data);
  return guarded([&] {
    *out = new xv_grid{xview::deserialize_grid({static_cast<const std::byte*>(data), size})};
  });
}

xv_status xv_grid_save(const xv_grid* grid, const char* path) {
  XV_REQUIRE(grid);
  XV_REQUIRE(path);
  return guarded([&] { xview::save_grid(path, grid->map); });
}

xv_status xv_grid_serialize(const xv_grid* grid, xv_buffer* out) {
  XV_REQUIRE(grid);
  XV_REQUIRE(out);
  return guarded([&] {
    const auto bytes = xview::serialize_grid(grid->map);
    to_buffer(bytes.data(), bytes.size(), out);
  });
}

void xv_grid_free(xv_grid* grid) { delete grid; }

void xv_grid_dims(const xv_grid* grid, uint32_t* rows, uint32_t* cols, uint32_t* channels) {
  if (grid == nullptr) return;
  if (rows) *rows = grid->map.rows;
  if (cols) *cols = grid->map.cols;
  if (channels) *channels = grid->map.channels;
}

float* xv_grid_data(xv_grid* grid) { return grid ? grid->map.values.data() : nullptr; }

const float* xv_grid_cdata(const xv_grid* grid) {
  return grid ? grid->map.values.data() : nullptr;
}

xv_status xv_encode_bev(const xv_cloud* cloud, const xv_bev_spec* spec, uint32_t slices,
                        double density_cap, xv_grid** out) {
  XV_REQUIRE(cloud);
  XV_REQUIRE(spec);
  XV_REQUIRE(out);
  return guarded([&] {
    xview::BevEncoderConfig cfg;
    cfg.slices = slices;
    if (density_cap > 0.0) cfg.density_cap = density_cap;
    *out = new xv_grid{xview::encode_bev(cloud->cloud, to_cpp(*spec), cfg)};
  });
}

xv_status xv_render_pgm(const xv_grid* grid, uint32_t channel, xv_buffer* out) {
  XV_REQUIRE(grid);
  XV_REQUIRE(out);
  return guarded([&] {
    const auto bytes = xview::render_pgm(grid->map, channel);
    to_buffer(bytes.data(), bytes.size(), out);
  });
}

// ---- pooling matrices

xv_status xv_matrix_build(const xv_cloud* cloud, const xv_calib* calib, const xv_front_spec* front,
                          const xv_bev_spec* bev, xv_direction direction, xv_kernel kernel,
                          xv_matrix** out) {
  XV_REQUIRE(cloud);
  XV_REQUIRE(calib);
  XV_REQUIRE(front);
  XV_REQUIRE(bev);
  XV_REQUIRE(out);
  if (direction != XV_FV2BEV && direction != XV_BEV2FV) {
    return set_error(XV_ERR_INVALID_ARGUMENT, "unknown direction");
  }
  if (kernel != XV_NEAREST && kernel != XV_BILINEAR) {
    return set_error(XV_ERR_INVALID_ARGUMENT, "unknown kernel");
  }
  return guarded([&] {
    const xview::ViewSpec f = to_cpp(*front);
    const xview::ViewSpec b = to_cpp(*bev);
    const bool fv2bev = direction == XV_FV2BEV;
    const auto k = kernel == XV_NEAREST ? xview::Kernel::kNearest : xview::Kernel::kBilinear;
    *out = new xv_matrix{
        xview::build_pooling_matrix(cloud->cloud, calib->chain, fv2bev ? f : b, fv2bev ? b : f, k)};
  });
}

xv_status xv_matrix_from_csr(xv_direction direction, uint64_t n_target, uint64_t n_source,
                             const uint64_t* row_offsets, const uint32_t* col_indices,
                             const float* weights, uint64_t nnz, xv_matrix** out) {
  XV_REQUIRE(row_offsets);
  XV_REQUIRE(out);
  if (nnz > 0) {
    XV_REQUIRE(col_indices);
    XV_REQUIRE(weights);
  }
  if (direction != XV_FV2BEV && direction != XV_BEV2FV) {
    return set_error(XV_ERR_INVALID_ARGUMENT, "unknown direction");
  }
  return guarded([&] {
    *out = new xv_matrix{xview::PoolingMatrix::from_csr(
        static_cast<xview::Direction>(direction), n_target, n_source,
        std::vector<std::uint64_t>(row_offsets, row_offsets + n_target + 1),
        std::vector<std::uint32_t>(col_indices, col_indices + nnz),
        std::vector<float>(weights, weights + nnz))};
  });
}

xv_status xv_matrix_load(const char* path, xv_matrix** out) {
  XV_REQUIRE(path);
  XV_REQUIRE(out);
  return guarded([&] { *out = new xv_matrix{xview::load_matrix(path)}; });
}

xv_status xv_matrix_from_bytes(const void* data, size_t size, xv_matrix** out) {
  XV_REQUIRE(out);
  if (size > 0) XV_REQUIRE(data);
  return guarded([&] {
    *out = new xv_matrix{xview::deserialize_matrix({static_cast<const std::byte*>(data), size})};
  });
}

xv_status xv_matrix_save(const xv_matrix* matrix, const char* path) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(path);
  return guarded([&] { xview::save_matrix(path, matrix->m); });
}

xv_status xv_matrix_serialize(const xv_matrix* matrix, xv_buffer* out) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(out);
  return guarded([&] {
    const auto bytes = xview::serialize_matrix(matrix->m);
    to_buffer(bytes.data(), bytes.size(), out);
  });
}

void xv_matrix_free(xv_matrix* matrix) { delete matrix; }

xv_status xv_matrix_info_get(const xv_matrix* matrix, xv_matrix_info* out) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(out);
  out->n_target = matrix->m.n_target();
  out->n_source = matrix->m.n_source();
  out->nnz = matrix->m.nnz();
  out->direction = static_cast<xv_direction>(matrix->m.direction());
  return XV_OK;
}

xv_status xv_matrix_csr(const xv_matrix* matrix, const uint64_t** row_offsets,
                        const uint32_t** col_indices, const float** weights) {
  XV_REQUIRE(matrix);
  if (row_offsets) *row_offsets = matrix->m.row_offsets().data();
  if (col_indices) *col_indices = matrix->m.col_indices().data();
  if (weights) *weights = matrix->m.weights().data();
  return XV_OK;
}

xv_status xv_matrix_coverage(const xv_matrix* matrix, xv_coverage* out) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(out);
  const auto s = xview::coverage(matrix->m);
  *out = {s.source_cells_used, s.target_cells_used, s.points_in_view, s.points_paired, s.nnz};
  return XV_OK;
}

xv_status xv_matrix_apply(const xv_matrix* matrix, const float* in, size_t in_cells,
                          size_t channels, float* out, size_t out_cells, unsigned threads) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(out);
  if (in_cells * channels > 0) XV_REQUIRE(in);
  return guarded([&] {
    check_channels(channels);
    if (in_cells != matrix->m.n_source() || out_cells != matrix->m.n_target()) {
      xview::fail(xview::ErrorCode::kShapeMismatch,
                  "apply expects " + std::to_string(matrix->m.n_source()) + " input and " +
                      std::to_string(matrix->m.n_target()) + " output cells");
    }
    xview::spmm(matrix->m, {in, in_cells * channels}, channels, {out, out_cells * channels},
                threads);
  });
}

xv_status xv_matrix_apply_grad(const xv_matrix* matrix, const float* grad, size_t grad_cells,
                               size_t channels, float* out, size_t out_cells, unsigned threads) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(out);
  if (grad_cells * channels > 0) XV_REQUIRE(grad);
  return guarded([&] {
    check_channels(channels);
    if (grad_cells != matrix->m.n_target() || out_cells != matrix->m.n_source()) {
      xview::fail(xview::ErrorCode::kShapeMismatch,
                  "apply_grad expects " + std::to_string(matrix->m.n_target()) +
                      " gradient and " + std::to_string(matrix->m.n_source()) + " output cells");
    }
    xview::FeatureMap g(static_cast<std::uint32_t>(grad_cells), 1,
                        static_cast<std::uint32_t>(channels));
    std::copy(grad, grad + grad_cells * channels, g.values.begin());
    const auto r = xview::apply_pooling_grad(matrix->m, g, threads);
    std::copy(r.values.begin(), r.values.end(), out);
  });
}

xv_status xv_matrix_pool_grid(const xv_matrix* matrix, const xv_grid* in, uint32_t out_rows,
                              uint32_t out_cols, unsigned threads, xv_grid** out) {
  XV_REQUIRE(matrix);
  XV_REQUIRE(in);
  XV_REQUIRE(out);
  return guarded([&] {
    *out = new xv_grid{xview::apply_pooling(matrix->m, in->map, threads, out_rows, out_cols)};
  });
}

// ---- detection math

xv_match_config xv_match_config_default(void) {
  const xview::MatchConfig c;
  return {c.pos_thresh, c.neg_thresh, c.center_radius};
}

double xv_axis_aligned_iou(const xv_box* a, const xv_box* b) {
  if (a == nullptr || b == nullptr) return 0.0;
  return xview::axis_aligned_iou(to_cpp(*a), to_cpp(*b));
}

size_t xv_anchor_count(const xv_bev_spec* spec, size_t n_sizes, size_t n_yaws) {
  if (spec == nullptr || spec->stride == 0 || !(spec->resolution > 0.0)) return 0;
  return to_cpp(*spec).cells() * n_sizes * n_yaws;
}

xv_status xv_generate_anchors(const xv_bev_spec* spec, const double* sizes, size_t n_sizes,
                              const double* yaws, size_t n_yaws, xv_box* out, size_t capacity,
                              size_t* written) {
  XV_REQUIRE(spec);
  XV_REQUIRE(sizes);
  XV_REQUIRE(yaws);
  XV_REQUIRE(out);
  return guarded([&] {
    std::vector<std::pair<double, double>> sz;
    for (size_t i = 0; i < n_sizes; ++i) sz.emplace_back(sizes[2 * i], sizes[2 * i + 1]);
    const auto anchors =
        xview::generate_anchors(to_cpp(*spec), sz, std::span<const double>(yaws, n_yaws));
    if (anchors.size() > capacity) {
      xview::fail(xview::ErrorCode::kShapeMismatch,
                  "anchor buffer holds " + std::to_string(capacity) + ", need " +
                      std::to_string(anchors.size()));
    }
    for (size_t i = 0; i < anchors.size(); ++i) {
      const auto& a = anchors[i];
      out[i] = {a.cx, a.cy, a.length, a.width, a.yaw};
    }
    if (written) *written = anchors.size();
  });
}

xv_status xv_match_anchors(const xv_box* anchors, size_t n_anchors, const xv_box* gts,
                           size_t n_gts, const xv_match_config* config, xv_anchor_match* out) {
  if (n_anchors > 0) {
    XV_REQUIRE(anchors);
    XV_REQUIRE(out);
  }
  if (n_gts > 0) XV_REQUIRE(gts);
  return guarded([&] {
    std::vector<xview::BevBox> a, g;
    a.reserve(n_anchors);
    g.reserve(n_gts);
    for (size_t i = 0; i < n_anchors; ++i) a.push_back(to_cpp(anchors[i]));
    for (size_t i = 0; i < n_gts; ++i) g.push_back(to_cpp(gts[i]));
    xview::MatchConfig cfg;
    if (config) cfg = {config->pos_thresh, config->neg_thresh, config->center_radius};
    const auto matches = xview::match_anchors(a, g, cfg);
    for (size_t i = 0; i < matches.size(); ++i) {
      const auto& m = matches[i];
      out[i] = {static_cast<xv_label>(m.label), static_cast<int64_t>(m.gt), m.iou,
                m.target.dx, m.target.dy, m.target.dl, m.target.dw, m.target.dyaw};
    }
  });
}

xv_status xv_focal_loss(const double* p, size_t n_classes, size_t label, double gamma,
                        double alpha_y, double* out) {
  XV_REQUIRE(p);
  XV_REQUIRE(out);
  return guarded([&] {
    xview::LossConfig cfg;
    cfg.gamma = gamma;
    cfg.class_weights.assign(n_classes, 1.0);
    if (label < n_classes) cfg.class_weights[label] = alpha_y;
    *out = xview::focal_loss(std::span<const double>(p, n_classes), label, cfg);
  });
}

xv_status xv_adaptive_negative_loss(double ce_neg, double fl_neg, double alpha, double* out) {
  XV_REQUIRE(out);
  return guarded([&] { *out = xview::adaptive_negative_loss(ce_neg, fl_neg, alpha); });
}

double xv_smooth_l1(double x) { return xview::smooth_l1(x); }

}  // extern "C"
