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


#include "xview/calib_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "byte_io.hpp"
#include "xview/error.hpp"

namespace xview {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_values(std::string_view key, std::string_view rest) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < rest.size()) {
    while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t' || rest[i] == '\r')) ++i;
    if (i >= rest.size()) break;
    std::size_t j = i;
    while (j < rest.size() && rest[j] != ' ' && rest[j] != '\t' && rest[j] != '\r') ++j;
    const std::string_view token = rest.substr(i, j - i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      fail(ErrorCode::kMalformedNumber,
           "calibration key '" + std::string(key) + "': cannot parse '" +
               std::string(token) + "'");
    }
    if (!std::isfinite(v)) {
      fail(ErrorCode::kNonFiniteValue,
           "calibration key '" + std::string(key) + "' has a non-finite value");
    }
    values.push_back(v);
    i = j;
  }
  return values;
}

const CalibrationEntry* find_entry(const std::vector<CalibrationEntry>& entries,
                                   std::string_view key) {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

template <std::size_t N>
std::array<double, N> take(const CalibrationEntry& e) {
  if (e.values.size() != N) {
    fail(ErrorCode::kWrongArity, "calibration key '" + e.key + "' expects " +
                                     std::to_string(N) + " values, got " +
                                     std::to_string(e.values.size()));
  }
  std::array<double, N> out{};
  std::copy(e.values.begin(), e.values.end(), out.begin());
  return out;
}

void check_orthonormal(const Mat33& r) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[i * 3 + k] * r[j * 3 + k];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-3) {
        fail(ErrorCode::kInvalidArgument, "rectification matrix is not orthonormal");
      }
    }
  }
}

void write_line(std::string& out, std::string_view key, std::span<const double> values) {
  out.append(key);
  out.push_back(':');
  char buf[64];
  for (double v : values) {
    const int n = std::snprintf(buf, sizeof buf, " %.12e", v);
    out.append(buf, static_cast<std::size_t>(n));
  }
  out.push_back('\n');
}

// 4x4 homogeneous embedding of a 3x4 or 3x3 block.
using Mat44 = std::array<double, 16>;

Mat44 expand4(const Mat34& m) {
  Mat44 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = m[r * 4 + c];
  out[15] = 1.0;
  return out;
}

Mat44 expand4(const Mat33& m) {
  Mat44 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r * 4 + c] = m[r * 3 + c];
  out[15] = 1.0;
  return out;
}

Mat44 mul(const Mat44& a, const Mat44& b) {
  Mat44 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[r * 4 + k] * b[k * 4 + c];
      out[r * 4 + c] = s;
    }
  return out;
}

}  // namespace

RawCalibration parse_calibration(std::string_view text) {
  RawCalibration calib;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorCode::kMalformedNumber,
           "calibration line without ':' separator: '" + std::string(line) + "'");
    }
    CalibrationEntry entry;
    entry.key = std::string(trim(line.substr(0, colon)));
    entry.values = parse_values(entry.key, line.substr(colon + 1));
    calib.entries.push_back(std::move(entry));
  }

  const auto* p2 = find_entry(calib.entries, "P2");
  if (!p2) fail(ErrorCode::kMissingKey, "calibration is missing 'P2'");
  const auto* rect = find_entry(calib.entries, "R0_rect");
  calib.rect_key = "R0_rect";
  if (!rect) {
    rect = find_entry(calib.entries, "R_rect");
    calib.rect_key = "R_rect";
  }
  if (!rect) fail(ErrorCode::kMissingKey, "calibration is missing 'R0_rect'");
  const auto* tr = find_entry(calib.entries, "Tr_velo_to_cam");
  if (!tr) fail(ErrorCode::kMissingKey, "calibration is missing 'Tr_velo_to_cam'");

  calib.cam_projection = take<12>(*p2);
  calib.rect_rotation = take<9>(*rect);
  calib.lidar_to_cam = take<12>(*tr);
  check_orthonormal(calib.rect_rotation);
  return calib;
}

std::string format_calibration(const RawCalibration& calib) {
  std::string out;
  if (calib.entries.empty()) {
    write_line(out, "P2", calib.cam_projection);
    write_line(out, calib.rect_key, calib.rect_rotation);
    write_line(out, "Tr_velo_to_cam", calib.lidar_to_cam);
    return out;
  }
  for (const auto& e : calib.entries) {
    if (e.key == "P2") {
      write_line(out, e.key, calib.cam_projection);
    } else if (e.key == calib.rect_key) {
      write_line(out, e.key, calib.rect_rotation);
    } else if (e.key == "Tr_velo_to_cam") {
      write_line(out, e.key, calib.lidar_to_cam);
    } else {
      write_line(out, e.key, e.values);
    }
  }
  return out;
}

CalibrationChain compose_chain(const RawCalibration& calib) {
  const Mat44 rt = mul(expand4(calib.rect_rotation), expand4(calib.lidar_to_cam));
  CalibrationChain chain;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += calib.cam_projection[r * 4 + k] * rt[k * 4 + c];
      chain.P[r * 4 + c] = s;
    }
  return chain;
}

PointCloud read_point_cloud(std::span<const std::byte> bytes) {
  constexpr std::size_t kRecord = 4 * sizeof(float);
  if (bytes.size() % kRecord != 0) {
    fail(ErrorCode::kTruncatedRecord, "point cloud size " + std::to_string(bytes.size()) +
                                          " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / kRecord;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    float rec[4];
    detail::load_le_array<float>(bytes.data() + i * kRecord, rec);
    for (float v : rec) {
      if (!std::isfinite(v)) {
        fail(ErrorCode::kNonFiniteValue, "point " + std::to_string(i) + " is not finite");
      }
    }
    float r = rec[3];
    if (r < 0.f || r > 1.f) {
      r = std::clamp(r, 0.f, 1.f);
      ++cloud.clamped_reflectance;
    }
    cloud.points[i] = Point{rec[0], rec[1], rec[2], r};
  }
  return cloud;
}

std::vector<std::byte> write_point_cloud(const PointCloud& cloud) {
  std::vector<std::byte> out;
  out.reserve(cloud.size() * 16);
  for (const auto& p : cloud.points) {
    detail::append_le(out, p.x);
    detail::append_le(out, p.y);
    detail::append_le(out, p.z);
    detail::append_le(out, p.r);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::byte> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                           static_cast<std::streamsize>(size))) {
    fail(ErrorCode::kIo, "cannot read '" + path + "'");
  }
  return bytes;
}

void write_binary_file(const std::string& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
}

RawCalibration load_calibration(const std::string& path) {
  return parse_calibration(read_text_file(path));
}

PointCloud load_point_cloud(const std::string& path) {
  return read_point_cloud(read_binary_file(path));
}

}  // namespace xview
