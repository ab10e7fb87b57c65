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


#include "xview/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xview/error.hpp"

namespace xview {

std::vector<std::byte> render_pgm(const FeatureMap& map, std::uint32_t channel) {
  if (channel >= map.channels) {
    fail(ErrorCode::kChannelOutOfRange, "channel " + std::to_string(channel) +
                                            " out of range (grid has " +
                                            std::to_string(map.channels) + ")");
  }
  const std::size_t n = map.cells();
  float lo = 0.f, hi = 0.f;
  if (n > 0) {
    lo = hi = map.at(0, channel);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, map.at(i, channel));
      hi = std::max(hi, map.at(i, channel));
    }
  }

  const std::string header =
      "P5\n" + std::to_string(map.cols) + " " + std::to_string(map.rows) + "\n255\n";
  std::vector<std::byte> out;
  out.reserve(header.size() + n);
  for (char c : header) out.push_back(static_cast<std::byte>(c));

  const double span = static_cast<double>(hi) - lo;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned level = 0;
    if (span > 0.0) {
      const double t = (static_cast<double>(map.at(i, channel)) - lo) / span;
      level = static_cast<unsigned>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    out.push_back(static_cast<std::byte>(level));
  }
  return out;
}

}  // namespace xview
