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


#ifndef XVIEW_XVIEW_H_
#define XVIEW_XVIEW_H_

/*
 * C interface to the xview library: sparse front-view <-> bird's-eye-view
 * pooling built from LIDAR points, KITTI I/O, BEV encoding and detector
 * labeling math.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an xv_status; on failure a message for the
 * calling thread is available from xv_last_error(). Handles are immutable
 * after creation and may be read from several threads at once.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(XVIEW_BUILDING)
#    define XV_API __declspec(dllexport)
#  else
#    define XV_API __declspec(dllimport)
#  endif
#else
#  define XV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xv_status {
  XV_OK = 0,
  XV_ERR_MISSING_KEY = 1,
  XV_ERR_MALFORMED_NUMBER = 2,
  XV_ERR_WRONG_ARITY = 3,
  XV_ERR_TRUNCATED_RECORD = 4,
  XV_ERR_NON_FINITE = 5,
  XV_ERR_VIEW_MISMATCH = 6,
  XV_ERR_SHAPE_MISMATCH = 7,
  XV_ERR_BAD_MAGIC = 8,
  XV_ERR_CHECKSUM_MISMATCH = 9,
  XV_ERR_TRUNCATED = 10,
  XV_ERR_INVALID_DISTRIBUTION = 11,
  XV_ERR_INVALID_ARGUMENT = 12,
  XV_ERR_CHANNEL_OUT_OF_RANGE = 13,
  XV_ERR_IO = 14,
  XV_ERR_NULL_POINTER = 15,
  XV_ERR_INTERNAL = 16
} xv_status;

XV_API const char* xv_version(void);
/* Stable machine-readable name, e.g. "ShapeMismatch". */
XV_API const char* xv_status_name(xv_status status);
/* Message of the last failed call on this thread; "" if none. */
XV_API const char* xv_last_error(void);

/* Buffers returned by the library (serialized files, text) */
typedef struct xv_buffer {
  uint8_t* data;
  size_t size;
} xv_buffer;
XV_API void xv_buffer_free(xv_buffer* buffer);

/* ---- calibration ---------------------------------------------------- */

typedef struct xv_calib xv_calib;

XV_API xv_status xv_calib_parse(const char* text, size_t length, xv_calib** out);
XV_API xv_status xv_calib_load(const char* path, xv_calib** out);
/* Wraps an already composed 3x4 row-major LIDAR -> pixel projection. */
XV_API xv_status xv_calib_from_projection(const double projection[12], xv_calib** out);
XV_API void xv_calib_free(xv_calib* calib);
XV_API xv_status xv_calib_projection(const xv_calib* calib, double projection[12]);
/* KITTI text form; fails for calibrations made from a projection. */
XV_API xv_status xv_calib_format(const xv_calib* calib, xv_buffer* out);
/* Calibration text matching the simulated scans. */
XV_API const char* xv_reference_calibration_text(void);

/* ---- point clouds --------------------------------------------------- */

typedef struct xv_cloud xv_cloud;

XV_API xv_status xv_cloud_from_bytes(const void* data, size_t size, xv_cloud** out);
XV_API xv_status xv_cloud_load(const char* path, xv_cloud** out);
/* `xyzr` holds `count` records of 4 floats. */
XV_API xv_status xv_cloud_from_points(const float* xyzr, size_t count, xv_cloud** out);
XV_API xv_status xv_cloud_simulate(uint64_t seed, xv_cloud** out);
XV_API void xv_cloud_free(xv_cloud* cloud);
XV_API size_t xv_cloud_size(const xv_cloud* cloud);
XV_API size_t xv_cloud_clamped_count(const xv_cloud* cloud);
/* Copies min(capacity, size) records into `xyzr`. */
XV_API size_t xv_cloud_copy_points(const xv_cloud* cloud, float* xyzr, size_t capacity);
XV_API xv_status xv_cloud_save(const xv_cloud* cloud, const char* path);

/* ---- view specs ----------------------------------------------------- */

typedef struct xv_front_spec {
  uint32_t width_px;
  uint32_t height_px;
  uint32_t stride;
} xv_front_spec;

typedef struct xv_bev_spec {
  double x_min, x_max;
  double y_min, y_max;
  double z_min, z_max;
  double resolution;
  uint32_t stride;
} xv_bev_spec;

/* 1280x384, stride 1. */
XV_API xv_front_spec xv_front_spec_default(void);
/* x in [0,60), y in [-30,30), z in [-2.5,1.0), 0.1 m, stride 1. */
XV_API xv_bev_spec xv_bev_spec_default(void);
XV_API void xv_front_spec_dims(const xv_front_spec* spec, uint32_t* rows, uint32_t* cols);
XV_API void xv_bev_spec_dims(const xv_bev_spec* spec, uint32_t* rows, uint32_t* cols);

/* ---- feature grids -------------------------------------------------- */

typedef struct xv_grid xv_grid;

XV_API xv_status xv_grid_create(uint32_t rows, uint32_t cols, uint32_t channels, xv_grid** out);
XV_API xv_status xv_grid_load(const char* path, xv_grid** out);
XV_API xv_status xv_grid_from_bytes(const void* data, size_t size, xv_grid** out);
XV_API xv_status xv_grid_save(const xv_grid* grid, const char* path);
XV_API xv_status xv_grid_serialize(const xv_grid* grid, xv_buffer* out);
XV_API void xv_grid_free(xv_grid* grid);
XV_API void xv_grid_dims(const xv_grid* grid, uint32_t* rows, uint32_t* cols, uint32_t* channels);
/* rows*cols*channels floats, channels fastest. */
XV_API float* xv_grid_data(xv_grid* grid);
XV_API const float* xv_grid_cdata(const xv_grid* grid);

/* [density, max reflectance, height slice 0..slices-1]; density_cap <= 0 means 8. */
XV_API xv_status xv_encode_bev(const xv_cloud* cloud, const xv_bev_spec* spec, uint32_t slices,
                               double density_cap, xv_grid** out);
/* Binary PGM (P5) of one channel, min-max normalized. */
XV_API xv_status xv_render_pgm(const xv_grid* grid, uint32_t channel, xv_buffer* out);

/* ---- pooling matrices ----------------------------------------------- */

typedef enum xv_direction { XV_FV2BEV = 0, XV_BEV2FV = 1 } xv_direction;
typedef enum xv_kernel { XV_NEAREST = 0, XV_BILINEAR = 1 } xv_kernel;

typedef struct xv_matrix xv_matrix;

typedef struct xv_matrix_info {
  uint64_t n_target;
  uint64_t n_source;
  uint64_t nnz;
  xv_direction direction;
} xv_matrix_info;

typedef struct xv_coverage {
  double source_cells_used;
  double target_cells_used;
  uint64_t points_in_view;
  uint64_t points_paired;
  uint64_t nnz;
} xv_coverage;

XV_API xv_status xv_matrix_build(const xv_cloud* cloud, const xv_calib* calib,
                                 const xv_front_spec* front, const xv_bev_spec* bev,
                                 xv_direction direction, xv_kernel kernel, xv_matrix** out);
/* Copies and validates raw CSR arrays (row_offsets has n_target+1 entries). */
XV_API xv_status xv_matrix_from_csr(xv_direction direction, uint64_t n_target, uint64_t n_source,
                                    const uint64_t* row_offsets, const uint32_t* col_indices,
                                    const float* weights, uint64_t nnz, xv_matrix** out);
XV_API xv_status xv_matrix_load(const char* path, xv_matrix** out);
XV_API xv_status xv_matrix_from_bytes(const void* data, size_t size, xv_matrix** out);
XV_API xv_status xv_matrix_save(const xv_matrix* matrix, const char* path);
XV_API xv_status xv_matrix_serialize(const xv_matrix* matrix, xv_buffer* out);
XV_API void xv_matrix_free(xv_matrix* matrix);

XV_API xv_status xv_matrix_info_get(const xv_matrix* matrix, xv_matrix_info* out);
/* Borrowed views valid for the lifetime of the handle. */
XV_API xv_status xv_matrix_csr(const xv_matrix* matrix, const uint64_t** row_offsets,
                               const uint32_t** col_indices, const float** weights);
XV_API xv_status xv_matrix_coverage(const xv_matrix* matrix, xv_coverage* out);

/* out[n_target x channels] = M in[n_source x channels]; threads 0 = all cores. */
XV_API xv_status xv_matrix_apply(const xv_matrix* matrix, const float* in, size_t in_cells,
                                 size_t channels, float* out, size_t out_cells,
                                 unsigned threads);
/* out[n_source x channels] = M^T grad[n_target x channels]. */
XV_API xv_status xv_matrix_apply_grad(const xv_matrix* matrix, const float* grad,
                                      size_t grad_cells, size_t channels, float* out,
                                      size_t out_cells, unsigned threads);
/* Grid-level apply; output shaped out_rows x out_cols (0,0 = n_target x 1). */
XV_API xv_status xv_matrix_pool_grid(const xv_matrix* matrix, const xv_grid* in,
                                     uint32_t out_rows, uint32_t out_cols, unsigned threads,
                                     xv_grid** out);

/* ---- detection math ------------------------------------------------- */

typedef struct xv_box {
  double cx, cy;
  double length, width;
  double yaw;
} xv_box;

typedef enum xv_label { XV_NEGATIVE = 0, XV_POSITIVE = 1, XV_IGNORE = 2 } xv_label;

typedef struct xv_anchor_match {
  xv_label label;
  int64_t gt; /* -1 unless positive */
  double iou;
  double dx, dy, dl, dw, dyaw;
} xv_anchor_match;

typedef struct xv_match_config {
  double pos_thresh;
  double neg_thresh;
  double center_radius; /* <= 0: half the anchor diagonal */
} xv_match_config;

XV_API xv_match_config xv_match_config_default(void);
XV_API double xv_axis_aligned_iou(const xv_box* a, const xv_box* b);
/* Number of anchors for a spec, so callers can size the output. */
XV_API size_t xv_anchor_count(const xv_bev_spec* spec, size_t n_sizes, size_t n_yaws);
/* `sizes` holds n_sizes (length, width) pairs. */
XV_API xv_status xv_generate_anchors(const xv_bev_spec* spec, const double* sizes, size_t n_sizes,
                                     const double* yaws, size_t n_yaws, xv_box* out,
                                     size_t capacity, size_t* written);
XV_API xv_status xv_match_anchors(const xv_box* anchors, size_t n_anchors, const xv_box* gts,
                                  size_t n_gts, const xv_match_config* config,
                                  xv_anchor_match* out);
XV_API xv_status xv_focal_loss(const double* p, size_t n_classes, size_t label, double gamma,
                               double alpha_y, double* out);
XV_API xv_status xv_adaptive_negative_loss(double ce_neg, double fl_neg, double alpha,
                                           double* out);
XV_API double xv_smooth_l1(double x);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* XVIEW_XVIEW_H_ */
