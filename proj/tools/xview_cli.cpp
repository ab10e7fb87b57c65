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


// xview command-line driver. Talks to the library only through xview.h.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xview/xview.h"

using json = nlohmann::json;

namespace {

// Carries a library status out of a subcommand.
struct CliError : std::runtime_error {
  xv_status status;
  CliError(xv_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(xv_status s, const char* context) {
  if (s != XV_OK) throw CliError(s, std::string(context) + ": " + xv_last_error());
}

[[noreturn]] void usage_error(const std::string& what) {
  throw CliError(XV_ERR_INVALID_ARGUMENT, what);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using CalibPtr = std::unique_ptr<xv_calib, Deleter<xv_calib, xv_calib_free>>;
using CloudPtr = std::unique_ptr<xv_cloud, Deleter<xv_cloud, xv_cloud_free>>;
using GridPtr = std::unique_ptr<xv_grid, Deleter<xv_grid, xv_grid_free>>;
using MatrixPtr = std::unique_ptr<xv_matrix, Deleter<xv_matrix, xv_matrix_free>>;

struct Buffer {
  xv_buffer b{nullptr, 0};
  ~Buffer() { xv_buffer_free(&b); }
};

void write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(XV_ERR_IO, "cannot create '" + path + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw CliError(XV_ERR_IO, "cannot write '" + path + "'");
}

std::uint64_t env_seed() {
  const char* s = std::getenv("XVIEW_SEED");
  if (s == nullptr || *s == '\0') return 0;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') usage_error("XVIEW_SEED must be an unsigned integer");
  return v;
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (expected != 0 && out.size() != expected) {
    usage_error(std::string(flag) + " expects " + std::to_string(expected) + " values");
  }
  return out;
}

// Parses "AxB" or "AxBxC".
std::vector<std::uint64_t> parse_dims(const std::string& text, std::size_t expected,
                                      const char* flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      usage_error(std::string(flag) + ": cannot parse '" + text + "'");
    }
  }
  if (out.size() != expected) usage_error(std::string(flag) + ": expected " + text);
  return out;
}

// View geometry flags shared by several subcommands.
struct ViewFlags {
  unsigned front_stride = 1;
  unsigned bev_stride = 1;
  std::string bev_range = "0,60,-30,30,-2.5,1.0";
  double resolution = 0.1;
  std::string image_size = "1280x384";

  void add(CLI::App* cmd) {
    cmd->add_option("--front-stride", front_stride, "Front-view downsample factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bev-stride", bev_stride, "BEV downsample factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bev-range", bev_range, "x0,x1,y0,y1,z0,z1 in meters");
    cmd->add_option("--resolution", resolution, "BEV meters per raw cell");
    cmd->add_option("--image-size", image_size, "Raw image WxH in pixels");
  }

  xv_front_spec front() const {
    const auto d = parse_dims(image_size, 2, "--image-size");
    return {static_cast<std::uint32_t>(d[0]), static_cast<std::uint32_t>(d[1]), front_stride};
  }

  xv_bev_spec bev() const {
    const auto r = parse_list(bev_range, 6, "--bev-range");
    return {r[0], r[1], r[2], r[3], r[4], r[5], resolution, bev_stride};
  }
};

void print_coverage_table(const xv_matrix_info& info, const xv_coverage& cov) {
  std::fprintf(stderr, "%-22s %s\n", "direction", info.direction == XV_FV2BEV ? "fv2bev" : "bev2fv");
  std::fprintf(stderr, "%-22s %llu x %llu\n", "shape (target x src)",
               static_cast<unsigned long long>(info.n_target),
               static_cast<unsigned long long>(info.n_source));
  std::fprintf(stderr, "%-22s %llu\n", "nnz", static_cast<unsigned long long>(cov.nnz));
  std::fprintf(stderr, "%-22s %llu\n", "points in image",
               static_cast<unsigned long long>(cov.points_in_view));
  std::fprintf(stderr, "%-22s %llu\n", "points paired",
               static_cast<unsigned long long>(cov.points_paired));
  std::fprintf(stderr, "%-22s %.4f %%\n", "source cells used", 100.0 * cov.source_cells_used);
  std::fprintf(stderr, "%-22s %.4f %%\n", "target cells used", 100.0 * cov.target_cells_used);
}

json coverage_json(const xv_matrix_info& info, const xv_coverage& cov) {
  return {{"direction", info.direction == XV_FV2BEV ? "fv2bev" : "bev2fv"},
          {"n_target", info.n_target},
          {"n_source", info.n_source},
          {"nnz", cov.nnz},
          {"points_in_view", cov.points_in_view},
          {"points_paired", cov.points_paired},
          {"source_cells_used", cov.source_cells_used},
          {"target_cells_used", cov.target_cells_used}};
}

// ---- build

struct BuildArgs {
  std::string calib, cloud, out;
  std::string direction = "fv2bev", kernel = "nearest";
  bool synthetic = false;
  ViewFlags view;
};

int cmd_build(const BuildArgs& a) {
  CalibPtr calib;
  CloudPtr cloud;
  xv_calib* c = nullptr;
  xv_cloud* pc = nullptr;
  if (a.synthetic) {
    const std::string text = xv_reference_calibration_text();
    check(xv_calib_parse(text.data(), text.size(), &c), "calibration");
    calib.reset(c);
    check(xv_cloud_simulate(env_seed(), &pc), "simulate");
    cloud.reset(pc);
  } else {
    if (a.calib.empty() || a.cloud.empty()) usage_error("build needs --calib and --cloud (or --synthetic)");
    check(xv_calib_load(a.calib.c_str(), &c), "calibration");
    calib.reset(c);
    check(xv_cloud_load(a.cloud.c_str(), &pc), "point cloud");
    cloud.reset(pc);
  }
  const xv_direction dir = a.direction == "fv2bev" ? XV_FV2BEV : XV_BEV2FV;
  const xv_kernel kernel = a.kernel == "nearest" ? XV_NEAREST : XV_BILINEAR;
  const auto front = a.view.front();
  const auto bev = a.view.bev();

  xv_matrix* m = nullptr;
  check(xv_matrix_build(cloud.get(), calib.get(), &front, &bev, dir, kernel, &m), "build");
  MatrixPtr matrix(m);
  if (!a.out.empty()) check(xv_matrix_save(matrix.get(), a.out.c_str()), "save");

  xv_matrix_info info{};
  xv_coverage cov{};
  check(xv_matrix_info_get(matrix.get(), &info), "info");
  check(xv_matrix_coverage(matrix.get(), &cov), "coverage");
  print_coverage_table(info, cov);
  json j = coverage_json(info, cov);
  j["points_total"] = xv_cloud_size(cloud.get());
  j["reflectance_clamped"] = xv_cloud_clamped_count(cloud.get());
  j["kernel"] = a.kernel;
  if (!a.out.empty()) j["out"] = a.out;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- pool / grad

struct PoolArgs {
  std::string matrix, features, out;
  unsigned threads = 1;
  ViewFlags view;
};

// Output grid shape: the view the matrix maps into, if the flags describe it.
std::pair<std::uint32_t, std::uint32_t> view_dims(const ViewFlags& v, bool bev_side,
                                                  std::uint64_t cells) {
  std::uint32_t rows = 0, cols = 0;
  if (bev_side) {
    const auto spec = v.bev();
    xv_bev_spec_dims(&spec, &rows, &cols);
  } else {
    const auto spec = v.front();
    xv_front_spec_dims(&spec, &rows, &cols);
  }
  if (static_cast<std::uint64_t>(rows) * cols != cells) return {0, 0};
  return {rows, cols};
}

int cmd_pool(const PoolArgs& a, bool gradient) {
  xv_matrix* m = nullptr;
  check(xv_matrix_load(a.matrix.c_str(), &m), "matrix");
  MatrixPtr matrix(m);
  xv_grid* g = nullptr;
  check(xv_grid_load(a.features.c_str(), &g), "features");
  GridPtr in(g);

  xv_matrix_info info{};
  check(xv_matrix_info_get(matrix.get(), &info), "info");
  std::uint32_t rows = 0, cols = 0, channels = 0;
  xv_grid_dims(in.get(), &rows, &cols, &channels);

  const bool to_bev = (info.direction == XV_FV2BEV) != gradient;
  const std::uint64_t out_cells = gradient ? info.n_source : info.n_target;
  const auto [out_rows, out_cols] = view_dims(a.view, to_bev, out_cells);

  xv_grid* o = nullptr;
  if (!gradient) {
    check(xv_matrix_pool_grid(matrix.get(), in.get(), out_rows, out_cols, a.threads, &o), "pool");
  } else {
    const std::uint64_t in_cells = static_cast<std::uint64_t>(rows) * cols;
    const std::uint32_t r = out_rows ? out_rows : static_cast<std::uint32_t>(out_cells);
    const std::uint32_t c = out_rows ? out_cols : 1;
    check(xv_grid_create(r, c, channels, &o), "grid");
    check(xv_matrix_apply_grad(matrix.get(), xv_grid_cdata(in.get()), in_cells, channels,
                               xv_grid_data(o), out_cells, a.threads),
          "grad");
  }
  GridPtr out(o);
  check(xv_grid_save(out.get(), a.out.c_str()), "save");
  std::uint32_t orow = 0, ocol = 0, och = 0;
  xv_grid_dims(out.get(), &orow, &ocol, &och);
  std::cout << json{{"out", a.out}, {"rows", orow}, {"cols", ocol}, {"channels", och}}.dump(2)
            << "\n";
  return 0;
}

// ---- encode / render

struct EncodeArgs {
  std::string cloud, out;
  bool synthetic = false;
  unsigned slices = 7;
  double density_cap = 8.0;
  ViewFlags view;
};

int cmd_encode(const EncodeArgs& a) {
  xv_cloud* pc = nullptr;
  if (a.synthetic) {
    check(xv_cloud_simulate(env_seed(), &pc), "simulate");
  } else {
    if (a.cloud.empty()) usage_error("encode needs --cloud (or --synthetic)");
    check(xv_cloud_load(a.cloud.c_str(), &pc), "point cloud");
  }
  CloudPtr cloud(pc);
  const auto spec = a.view.bev();
  xv_grid* g = nullptr;
  check(xv_encode_bev(cloud.get(), &spec, a.slices, a.density_cap, &g), "encode");
  GridPtr grid(g);
  check(xv_grid_save(grid.get(), a.out.c_str()), "save");
  std::uint32_t rows = 0, cols = 0, ch = 0;
  xv_grid_dims(grid.get(), &rows, &cols, &ch);
  std::cout << json{{"out", a.out}, {"rows", rows}, {"cols", cols}, {"channels", ch}}.dump(2)
            << "\n";
  return 0;
}

struct RenderArgs {
  std::string grid, out;
  unsigned channel = 0;
};

int cmd_render(const RenderArgs& a) {
  xv_grid* g = nullptr;
  check(xv_grid_load(a.grid.c_str(), &g), "grid");
  GridPtr grid(g);
  Buffer img;
  check(xv_render_pgm(grid.get(), a.channel, &img.b), "render");
  write_file(a.out, img.b.data, img.b.size);
  std::cout << json{{"out", a.out}, {"bytes", img.b.size}}.dump(2) << "\n";
  return 0;
}

// ---- coverage of an existing matrix file

int cmd_coverage(const std::string& path) {
  xv_matrix* m = nullptr;
  check(xv_matrix_load(path.c_str(), &m), "matrix");
  MatrixPtr matrix(m);
  xv_matrix_info info{};
  xv_coverage cov{};
  check(xv_matrix_info_get(matrix.get(), &info), "info");
  check(xv_matrix_coverage(matrix.get(), &cov), "coverage");
  print_coverage_table(info, cov);
  std::cout << coverage_json(info, cov).dump(2) << "\n";
  return 0;
}

// ---- synth

struct SynthArgs {
  std::string cloud_out, calib_out;
};

int cmd_synth(const SynthArgs& a) {
  xv_cloud* pc = nullptr;
  const auto seed = env_seed();
  check(xv_cloud_simulate(seed, &pc), "simulate");
  CloudPtr cloud(pc);
  check(xv_cloud_save(cloud.get(), a.cloud_out.c_str()), "save cloud");
  const std::string text = xv_reference_calibration_text();
  write_file(a.calib_out, text.data(), text.size());
  std::cout << json{{"seed", seed}, {"points", xv_cloud_size(cloud.get())},
                    {"cloud", a.cloud_out}, {"calib", a.calib_out}}
                   .dump(2)
            << "\n";
  return 0;
}

// ---- bench

struct BenchArgs {
  std::string workload = "conv4";
  std::string source, target;
  std::uint64_t nnz = 20000;
  unsigned reps = 20;
  unsigned threads = 1;
};

struct Workload {
  std::uint64_t src_cells, dst_cells, channels, nnz;
  double reference_ms;  // published pooling time for this shape, 0 if none
};

Workload resolve_workload(const BenchArgs& a) {
  if (a.workload == "conv4") return {155 * 46, 75 * 75, 512, a.nnz, 14.0};
  if (a.workload == "raw") return {1280 * 384, 600 * 600, 9, a.nnz, 20.0};
  if (a.workload == "empty") return {155 * 46, 75 * 75, 512, 0, 0.0};
  if (a.workload == "custom") {
    if (a.source.empty() || a.target.empty()) usage_error("custom workload needs --source and --target");
    const auto s = parse_dims(a.source, 3, "--source");
    const auto t = parse_dims(a.target, 2, "--target");
    return {s[0] * s[1], t[0] * t[1], s[2], a.nnz, 0.0};
  }
  usage_error("unknown workload '" + a.workload + "'");
}

// Row-normalized matrix with `nnz` distinct random entries.
MatrixPtr random_matrix(std::uint64_t n_target, std::uint64_t n_source, std::uint64_t nnz,
                        std::mt19937_64& rng) {
  if (nnz > n_target * n_source) usage_error("nnz exceeds matrix size");
  std::uniform_int_distribution<std::uint64_t> pick(0, n_target * n_source - 1);
  std::vector<std::uint64_t> flat;
  flat.reserve(nnz);
  while (flat.size() < nnz) {
    flat.push_back(pick(rng));
    if (flat.size() == nnz) {
      std::sort(flat.begin(), flat.end());
      flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    }
  }
  std::vector<std::uint64_t> offsets(n_target + 1, 0);
  std::vector<std::uint32_t> cols(flat.size());
  std::vector<float> weights(flat.size());
  std::uniform_real_distribution<double> U(0.1, 1.0);
  std::vector<double> raw(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) {
    ++offsets[flat[k] / n_source + 1];
    cols[k] = static_cast<std::uint32_t>(flat[k] % n_source);
    raw[k] = U(rng);
  }
  for (std::uint64_t r = 0; r < n_target; ++r) {
    offsets[r + 1] += offsets[r];
    const double sum = std::accumulate(raw.begin() + offsets[r], raw.begin() + offsets[r + 1], 0.0);
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) weights[k] = static_cast<float>(raw[k] / sum);
  }
  xv_matrix* m = nullptr;
  check(xv_matrix_from_csr(XV_FV2BEV, n_target, n_source, offsets.data(), cols.data(),
                           weights.data(), flat.size(), &m),
        "matrix");
  return MatrixPtr(m);
}

json summarize(std::vector<double> ms) {
  std::sort(ms.begin(), ms.end());
  const auto at = [&](double q) {
    const auto i = static_cast<std::size_t>(std::ceil(q * ms.size())) - 1;
    return ms[std::min(i, ms.size() - 1)];
  };
  return {{"median_ms", at(0.5)}, {"p95_ms", at(0.95)}, {"min_ms", ms.front()}};
}

int cmd_bench(const BenchArgs& a) {
  if (a.reps == 0) usage_error("--reps must be >= 1");
  const Workload w = resolve_workload(a);
  std::mt19937_64 rng(env_seed());
  const MatrixPtr matrix = random_matrix(w.dst_cells, w.src_cells, w.nnz, rng);

  std::vector<float> features(w.src_cells * w.channels), pooled(w.dst_cells * w.channels);
  std::vector<float> upstream(w.dst_cells * w.channels), grad(w.src_cells * w.channels);
  std::uniform_real_distribution<float> U(-1.f, 1.f);
  for (auto& v : features) v = U(rng);
  for (auto& v : upstream) v = U(rng);

  using clock = std::chrono::steady_clock;
  std::vector<double> apply_ms, grad_ms;
  for (unsigned r = 0; r < a.reps; ++r) {
    auto t0 = clock::now();
    check(xv_matrix_apply(matrix.get(), features.data(), w.src_cells, w.channels, pooled.data(),
                          w.dst_cells, a.threads),
          "apply");
    auto t1 = clock::now();
    check(xv_matrix_apply_grad(matrix.get(), upstream.data(), w.dst_cells, w.channels,
                               grad.data(), w.src_cells, a.threads),
          "apply_grad");
    auto t2 = clock::now();
    apply_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    grad_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
  }
  xv_matrix_info info{};
  check(xv_matrix_info_get(matrix.get(), &info), "info");

  json j = {{"workload", a.workload},
            {"source_cells", w.src_cells},
            {"target_cells", w.dst_cells},
            {"channels", w.channels},
            {"nnz", info.nnz},
            {"threads", a.threads},
            {"reps", a.reps},
            {"apply", summarize(apply_ms)},
            {"apply_grad", summarize(grad_ms)}};
  if (w.reference_ms > 0.0) j["reference_ms"] = w.reference_ms;

  std::fprintf(stderr, "%-12s %10s %10s\n", "op", "median_ms", "p95_ms");
  for (const char* op : {"apply", "apply_grad"}) {
    std::fprintf(stderr, "%-12s %10.3f %10.3f\n", op, j[op]["median_ms"].get<double>(),
                 j[op]["p95_ms"].get<double>());
  }
  if (w.reference_ms > 0.0) std::fprintf(stderr, "reference    %10.3f\n", w.reference_ms);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- labels

struct LabelArgs {
  std::string boxes;
  std::string anchor_sizes = "1.0x0.6";
  std::string yaws = "0,1.5707963267948966";
  double pos = 0.5, neg = 0.35, radius = 0.0;
  ViewFlags view;
};

std::vector<xv_box> read_boxes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(XV_ERR_IO, "cannot open '" + path + "'");
  std::vector<xv_box> boxes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    xv_box b{};
    if (!(ss >> b.cx)) continue;
    if (!(ss >> b.cy >> b.length >> b.width >> b.yaw) || !(b.length > 0.0) || !(b.width > 0.0)) {
      throw CliError(XV_ERR_MALFORMED_NUMBER,
                     path + ":" + std::to_string(lineno) + ": expected 'cx cy length width yaw'");
    }
    boxes.push_back(b);
  }
  return boxes;
}

int cmd_labels(const LabelArgs& a) {
  const auto gts = read_boxes(a.boxes);
  const auto spec = a.view.bev();
  std::vector<double> sizes;
  {
    std::stringstream ss(a.anchor_sizes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto pos = item.find('x');
      if (pos == std::string::npos) usage_error("--anchor-sizes expects LxW[,LxW...]");
      sizes.push_back(parse_list(item.substr(0, pos), 1, "--anchor-sizes")[0]);
      sizes.push_back(parse_list(item.substr(pos + 1), 1, "--anchor-sizes")[0]);
    }
  }
  const auto yaws = parse_list(a.yaws, 0, "--yaws");
  const std::size_t n_sizes = sizes.size() / 2;
  const std::size_t count = xv_anchor_count(&spec, n_sizes, yaws.size());
  std::vector<xv_box> anchors(count);
  std::size_t written = 0;
  check(xv_generate_anchors(&spec, sizes.data(), n_sizes, yaws.data(), yaws.size(),
                            anchors.data(), anchors.size(), &written),
        "anchors");
  anchors.resize(written);

  xv_match_config cfg{a.pos, a.neg, a.radius};
  std::vector<xv_anchor_match> matches(anchors.size());
  check(xv_match_anchors(anchors.data(), anchors.size(), gts.data(), gts.size(), &cfg,
                         matches.data()),
        "match");

  std::size_t pos = 0, neg = 0, ign = 0;
  std::vector<std::size_t> per_gt(gts.size(), 0);
  for (const auto& m : matches) {
    if (m.label == XV_POSITIVE) {
      ++pos;
      ++per_gt[static_cast<std::size_t>(m.gt)];
    } else if (m.label == XV_NEGATIVE) {
      ++neg;
    } else {
      ++ign;
    }
  }
  const auto unmatched =
      static_cast<std::size_t>(std::count(per_gt.begin(), per_gt.end(), std::size_t{0}));
  std::fprintf(stderr, "%-12s %zu\n%-12s %zu\n%-12s %zu\n%-12s %zu\n%-12s %zu\n%-12s %zu\n",
               "anchors", anchors.size(), "gt boxes", gts.size(), "positive", pos, "negative",
               neg, "ignore", ign, "unmatched gt", unmatched);
  std::cout << json{{"anchors", anchors.size()},
                    {"gt_boxes", gts.size()},
                    {"positive", pos},
                    {"negative", neg},
                    {"ignore", ign},
                    {"positives_per_gt", per_gt},
                    {"unmatched_gt", unmatched}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xview: sparse front-view / bird's-eye-view pooling from LIDAR points"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for pooling (0 = all cores)");
  // Lets `--threads` follow the subcommand name as well.
  app.fallthrough();

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build a pooling matrix for one frame");
  c_build->add_option("--calib", build.calib, "KITTI calibration file");
  c_build->add_option("--cloud", build.cloud, "KITTI velodyne .bin file");
  c_build->add_flag("--synthetic", build.synthetic, "Use a simulated frame (seed: XVIEW_SEED)");
  c_build->add_option("--direction", build.direction)->check(CLI::IsMember({"fv2bev", "bev2fv"}));
  c_build->add_option("--kernel", build.kernel)->check(CLI::IsMember({"nearest", "bilinear"}));
  c_build->add_option("--out", build.out, "Output .snhp matrix file");
  build.view.add(c_build);

  PoolArgs pool;
  auto* c_pool = app.add_subcommand("pool", "Apply a matrix to a feature grid (B = M F)");
  c_pool->add_option("--matrix", pool.matrix)->required();
  c_pool->add_option("--features", pool.features)->required();
  c_pool->add_option("--out", pool.out)->required();
  pool.view.add(c_pool);

  PoolArgs grad;
  auto* c_grad = app.add_subcommand("grad", "Apply the transpose to an upstream gradient grid");
  c_grad->add_option("--matrix", grad.matrix)->required();
  c_grad->add_option("--grad", grad.features)->required();
  c_grad->add_option("--out", grad.out)->required();
  grad.view.add(c_grad);

  EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Rasterize a point cloud into a BEV grid");
  c_encode->add_option("--cloud", encode.cloud);
  c_encode->add_flag("--synthetic", encode.synthetic);
  c_encode->add_option("--slices", encode.slices, "Height slices")->check(CLI::PositiveNumber);
  c_encode->add_option("--density-cap", encode.density_cap, "Points per cell that saturate density");
  c_encode->add_option("--out", encode.out)->required();
  encode.view.add(c_encode);

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "Render one grid channel as a PGM image");
  c_render->add_option("--grid", render.grid)->required();
  c_render->add_option("--channel", render.channel, "Channel to render (default 0)");
  c_render->add_option("--out", render.out)->required();

  std::string coverage_path;
  auto* c_cov = app.add_subcommand("coverage", "Report coverage of a matrix file");
  c_cov->add_option("--matrix", coverage_path)->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time SpMM forward and gradient");
  c_bench->add_option("--workload", bench.workload)
      ->check(CLI::IsMember({"conv4", "raw", "empty", "custom"}));
  c_bench->add_option("--source", bench.source, "HxWxC for the custom workload");
  c_bench->add_option("--target", bench.target, "HxW for the custom workload");
  c_bench->add_option("--nnz", bench.nnz, "Nonzeros for the custom workload");
  c_bench->add_option("--reps", bench.reps, "Timed repetitions per operation");

  LabelArgs labels;
  auto* c_labels = app.add_subcommand("labels", "Anchor labeling statistics for BEV boxes");
  c_labels->add_option("--boxes", labels.boxes, "Text file: cx cy length width yaw per line")
      ->required();
  c_labels->add_option("--anchor-sizes", labels.anchor_sizes, "LxW[,LxW...] meters");
  c_labels->add_option("--yaws", labels.yaws, "Comma separated radians");
  c_labels->add_option("--pos", labels.pos, "Positive IoU threshold");
  c_labels->add_option("--neg", labels.neg, "Negative IoU threshold");
  c_labels->add_option("--radius", labels.radius, "Center gate in meters (0 = half diagonal)");
  labels.view.add(c_labels);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a simulated frame (seed: XVIEW_SEED)");
  c_synth->add_option("--cloud-out", synth.cloud_out)->required();
  c_synth->add_option("--calib-out", synth.calib_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    pool.threads = grad.threads = bench.threads = threads;
    if (*c_build) return cmd_build(build);
    if (*c_pool) return cmd_pool(pool, false);
    if (*c_grad) return cmd_pool(grad, true);
    if (*c_encode) return cmd_encode(encode);
    if (*c_render) return cmd_render(render);
    if (*c_cov) return cmd_coverage(coverage_path);
    if (*c_bench) return cmd_bench(bench);
    if (*c_labels) return cmd_labels(labels);
    if (*c_synth) return cmd_synth(synth);
  } catch (const CliError& e) {
    std::fprintf(stderr, "xview: error[%s]: %s\n", xv_status_name(e.status), e.what());
    return static_cast<int>(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "xview: error[Internal]: %s\n", e.what());
    return static_cast<int>(XV_ERR_INTERNAL);
  }
  return 0;
}
