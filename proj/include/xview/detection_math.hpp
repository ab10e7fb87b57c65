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
#include <span>
#include <utility>
#include <vector>

#include "xview/view_geometry.hpp"

namespace xview {

struct BevBox {
  double cx = 0.0, cy = 0.0;  // meters
  double length = 1.0;        // along yaw
  double width = 1.0;
  double yaw = 0.0;           // radians in (-pi, pi]
};

/// Maps any angle into (-pi, pi]; -pi itself maps to +pi.
double wrap_angle(double radians) noexcept;

/// Size-only IoU: both boxes are turned to yaw 0 and co-centered, so only
/// length and width matter.
double axis_aligned_iou(const BevBox& a, const BevBox& b) noexcept;

enum class MatchLabel : std::uint8_t { kNegative = 0, kPositive = 1, kIgnore = 2 };

struct RegressionTarget {
  double dx = 0.0, dy = 0.0, dl = 0.0, dw = 0.0, dyaw = 0.0;
};

struct AnchorMatch {
  std::size_t anchor = 0;
  MatchLabel label = MatchLabel::kNegative;
  std::ptrdiff_t gt = -1;  // matched ground truth for positives, else -1
  RegressionTarget target;
  double iou = 0.0;        // size IoU with the best candidate, 0 if none
};

struct MatchConfig {
  double pos_thresh = 0.5;
  double neg_thresh = 0.35;
  // Center-distance gate in meters. Non-positive means half the anchor
  // diagonal, evaluated per anchor.
  double center_radius = 0.0;
};

/// Labels every anchor. A gt is a candidate for an anchor only if their
/// centers lie within the gate radius; the best candidate is the one with
/// highest size IoU, then nearest center, then lowest index.
/// Throws Error{kInvalidArgument} if pos_thresh < neg_thresh.
std::vector<AnchorMatch> match_anchors(std::span<const BevBox> anchors,
                                       std::span<const BevBox> gts,
                                       const MatchConfig& config = {});

RegressionTarget encode_target(const BevBox& anchor, const BevBox& gt) noexcept;
BevBox decode_target(const BevBox& anchor, const RegressionTarget& t) noexcept;

/// One anchor per (cell, size, yaw) at the cell centers, in that nesting
/// order. `sizes` are (length, width) pairs in meters.
/// Throws Error{kInvalidArgument} when either list is empty.
std::vector<BevBox> generate_anchors(const BevSpec& spec,
                                     std::span<const std::pair<double, double>> sizes,
                                     std::span<const double> yaws);

struct LossConfig {
  double gamma = 2.0;
  std::vector<double> class_weights;  // alpha_y; empty means 1 for every class
  double ema_decay = 0.998;
  double warmup_fraction = 0.10;
  std::uint64_t update_interval = 500;  // iterations between EMA updates
};

void validate(const LossConfig& cfg);

double cross_entropy(std::span<const double> p, std::size_t y);

/// alpha_y (1 - p_y)^gamma (-ln p_y), p_y clamped to >= 1e-12.
/// Throws Error{kInvalidDistribution} unless p is a distribution to 1e-6.
double focal_loss(std::span<const double> p, std::size_t y, const LossConfig& cfg);

/// (1 - alpha) ce_neg + alpha fl_neg.
double adaptive_negative_loss(double ce_neg, double fl_neg, double alpha);

struct AlphaState {
  double ema = 0.0;
  std::uint64_t iteration = 0;
  double alpha = 0.0;  // weight to use for the current iteration
};

/// Advances one training iteration. On every `update_interval`-th iteration
/// the recall EMA absorbs `recall_batch`; `alpha` is then refreshed from the
/// warm-up rule.
/// Throws Error{kInvalidArgument} if recall_batch is outside [0, 1].
AlphaState update_alpha(const AlphaState& state, double recall_batch,
                        std::uint64_t total_iters, const LossConfig& cfg);

/// 0 during warm-up (iteration < warmup_fraction * total_iters), else the EMA.
double used_alpha(const AlphaState& state, std::uint64_t total_iters,
                  const LossConfig& cfg) noexcept;

double smooth_l1(double x) noexcept;

}  // namespace xview
