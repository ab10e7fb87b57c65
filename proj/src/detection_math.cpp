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


#include "xview/detection_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "xview/error.hpp"

namespace xview {

double wrap_angle(double radians) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

double axis_aligned_iou(const BevBox& a, const BevBox& b) noexcept {
  const double inter = std::min(a.length, b.length) * std::min(a.width, b.width);
  const double uni = a.length * a.width + b.length * b.width - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

RegressionTarget encode_target(const BevBox& anchor, const BevBox& gt) noexcept {
  return {(gt.cx - anchor.cx) / anchor.length, (gt.cy - anchor.cy) / anchor.width,
          std::log(gt.length / anchor.length), std::log(gt.width / anchor.width),
          wrap_angle(gt.yaw - anchor.yaw)};
}

BevBox decode_target(const BevBox& anchor, const RegressionTarget& t) noexcept {
  return {anchor.cx + t.dx * anchor.length, anchor.cy + t.dy * anchor.width,
          anchor.length * std::exp(t.dl), anchor.width * std::exp(t.dw),
          wrap_angle(anchor.yaw + t.dyaw)};
}

std::vector<AnchorMatch> match_anchors(std::span<const BevBox> anchors,
                                       std::span<const BevBox> gts,
                                       const MatchConfig& config) {
  if (config.pos_thresh < config.neg_thresh) {
    fail(ErrorCode::kInvalidArgument, "pos_thresh must be >= neg_thresh");
  }
  std::vector<AnchorMatch> out(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const BevBox& a = anchors[i];
    const double radius = config.center_radius > 0.0
                              ? config.center_radius
                              : 0.5 * std::hypot(a.length, a.width);
    std::ptrdiff_t best = -1;
    double best_iou = -1.0, best_dist = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double dist = std::hypot(gts[g].cx - a.cx, gts[g].cy - a.cy);
      if (dist > radius) continue;
      const double iou = axis_aligned_iou(a, gts[g]);
      if (iou > best_iou || (iou == best_iou && dist < best_dist)) {
        best = static_cast<std::ptrdiff_t>(g);
        best_iou = iou;
        best_dist = dist;
      }
    }

    AnchorMatch& m = out[i];
    m.anchor = i;
    m.iou = best < 0 ? 0.0 : best_iou;
    if (best >= 0 && best_iou >= config.pos_thresh) {
      m.label = MatchLabel::kPositive;
      m.gt = best;
      m.target = encode_target(a, gts[static_cast<std::size_t>(best)]);
    } else if (best < 0 || best_iou < config.neg_thresh) {
      m.label = MatchLabel::kNegative;
    } else {
      m.label = MatchLabel::kIgnore;
    }
  }
  return out;
}

std::vector<BevBox> generate_anchors(const BevSpec& spec,
                                     std::span<const std::pair<double, double>> sizes,
                                     std::span<const double> yaws) {
  validate(spec);
  if (sizes.empty() || yaws.empty()) {
    fail(ErrorCode::kInvalidArgument, "anchor generation needs at least one size and yaw");
  }
  const std::uint32_t rows = spec.map_rows(), cols = spec.map_cols();
  const double cell = spec.cell_size();
  std::vector<BevBox> anchors;
  anchors.reserve(static_cast<std::size_t>(rows) * cols * sizes.size() * yaws.size());
  for (std::uint32_t r = 0; r < rows; ++r) {
    const double cx = spec.x_min + (r + 0.5) * cell;
    for (std::uint32_t c = 0; c < cols; ++c) {
      const double cy = spec.y_min + (c + 0.5) * cell;
      for (const auto& [l, w] : sizes)
        for (double yaw : yaws) anchors.push_back({cx, cy, l, w, wrap_angle(yaw)});
    }
  }
  return anchors;
}

void validate(const LossConfig& cfg) {
  if (!(cfg.gamma >= 0.0)) fail(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  for (double a : cfg.class_weights) {
    if (!(a > 0.0)) fail(ErrorCode::kInvalidArgument, "class weights must be > 0");
  }
  if (!(cfg.ema_decay > 0.0 && cfg.ema_decay < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ema_decay must lie in (0, 1)");
  }
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "warmup_fraction must lie in [0, 1]");
  }
  if (cfg.update_interval == 0) fail(ErrorCode::kInvalidArgument, "update_interval must be >= 1");
}

namespace {

double class_probability(std::span<const double> p, std::size_t y) {
  if (y >= p.size()) {
    fail(ErrorCode::kInvalidArgument, "label " + std::to_string(y) + " outside " +
                                          std::to_string(p.size()) + " classes");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorCode::kInvalidDistribution, "probabilities must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail(ErrorCode::kInvalidDistribution, "probabilities must sum to 1");
  }
  return std::max(p[y], 1e-12);
}

}  // namespace

double cross_entropy(std::span<const double> p, std::size_t y) {
  return -std::log(class_probability(p, y));
}

double focal_loss(std::span<const double> p, std::size_t y, const LossConfig& cfg) {
  validate(cfg);
  const double py = class_probability(p, y);
  double alpha = 1.0;
  if (!cfg.class_weights.empty()) {
    if (y >= cfg.class_weights.size()) {
      fail(ErrorCode::kInvalidArgument, "no class weight for label " + std::to_string(y));
    }
    alpha = cfg.class_weights[y];
  }
  return alpha * std::pow(1.0 - py, cfg.gamma) * -std::log(py);
}

double adaptive_negative_loss(double ce_neg, double fl_neg, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  return (1.0 - alpha) * ce_neg + alpha * fl_neg;
}

AlphaState update_alpha(const AlphaState& state, double recall_batch,
                        std::uint64_t total_iters, const LossConfig& cfg) {
  validate(cfg);
  if (!(recall_batch >= 0.0 && recall_batch <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "recall must lie in [0, 1]");
  }
  AlphaState next = state;
  ++next.iteration;
  if (next.iteration % cfg.update_interval == 0) {
    next.ema = cfg.ema_decay * state.ema + (1.0 - cfg.ema_decay) * recall_batch;
  }
  next.alpha = used_alpha(next, total_iters, cfg);
  return next;
}

double used_alpha(const AlphaState& state, std::uint64_t total_iters,
                  const LossConfig& cfg) noexcept {
  const double warmup = cfg.warmup_fraction * static_cast<double>(total_iters);
  return static_cast<double>(state.iteration) < warmup ? 0.0 : state.ema;
}

double smooth_l1(double x) noexcept {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

}  // namespace xview
