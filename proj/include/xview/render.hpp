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
#include <vector>

#include "xview/feature_map.hpp"

namespace xview {

/// Binary PGM (P5, maxval 255) of one channel, min-max normalized. A
/// constant channel renders black. Throws Error{kChannelOutOfRange}.
std::vector<std::byte> render_pgm(const FeatureMap& map, std::uint32_t channel);

}  // namespace xview
