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


#include "xview/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace xview {

namespace {

struct Box {
  double cx, cy, z0;  // z0 = bottom
  double length, width, height;
  double yaw;
  float reflectance;
};

struct Pole {
  double cx, cy, radius, z0, z1;
  float reflectance;
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Pole> poles;
  double ground_z;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

double hit_box(const Box& b, const double o[3], const double d[3]) {
  // Ray in the box frame, origin at the box center.
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double ox = o[0] - b.cx, oy = o[1] - b.cy;
  const double lo[3] = {c * ox + s * oy, -s * ox + c * oy, o[2] - b.z0 - 0.5 * b.height};
  const double ld[3] = {c * d[0] + s * d[1], -s * d[0] + c * d[1], d[2]};
  const double half[3] = {0.5 * b.length, 0.5 * b.width, 0.5 * b.height};
  double t0 = 0.0, t1 = kInf;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ld[k]) < 1e-12) {
      if (std::abs(lo[k]) > half[k]) return kInf;
      continue;
    }
    double a = (-half[k] - lo[k]) / ld[k];
    double e = (half[k] - lo[k]) / ld[k];
    if (a > e) std::swap(a, e);
    t0 = std::max(t0, a);
    t1 = std::min(t1, e);
    if (t0 > t1) return kInf;
  }
  return t0 > 1e-6 ? t0 : kInf;
}

double hit_pole(const Pole& p, const double o[3], const double d[3]) {
  const double ox = o[0] - p.cx, oy = o[1] - p.cy;
  const double a = d[0] * d[0] + d[1] * d[1];
  if (a < 1e-12) return kInf;
  const double b = 2.0 * (ox * d[0] + oy * d[1]);
  const double c = ox * ox + oy * oy - p.radius * p.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  if (t <= 1e-6) return kInf;
  const double z = o[2] + t * d[2];
  return (z >= p.z0 && z <= p.z1) ? t : kInf;
}

Scene make_scene(std::mt19937_64& rng, double sensor_height) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };

  Scene scene;
  scene.ground_z = -sensor_height;
  const double road = uni(5.0, 8.0);
  const double walk = uni(3.0, 6.0);

  // Building facades on both sides, broken into blocks with gaps.
  for (int side : {-1, 1}) {
    double x = -80.0;
    while (x < 90.0) {
      const double len = uni(8.0, 30.0);
      if (U(rng) > 0.15) {
        const double depth = uni(8.0, 15.0);
        const double y = side * (road + walk + 0.5 * depth + uni(0.0, 2.0));
        scene.boxes.push_back({x + 0.5 * len, y, scene.ground_z, len, depth, uni(6.0, 15.0), 0.0,
                               static_cast<float>(uni(0.1, 0.4))});
      }
      x += len + uni(1.0, 6.0);
    }
  }

  // Parked cars along the curbs, a few moving cars in the lanes.
  for (int side : {-1, 1}) {
    double x = uni(-40.0, 0.0);
    while (x < 70.0) {
      const double len = uni(3.8, 4.8);
      if (U(rng) > 0.35) {
        scene.boxes.push_back({x, side * (road - 1.1 + uni(-0.2, 0.2)), scene.ground_z + 0.2,
                               len, uni(1.6, 1.9), uni(1.3, 1.6), uni(-0.08, 0.08),
                               static_cast<float>(uni(0.05, 0.9))});
      }
      x += len + uni(1.0, 10.0);
    }
  }
  const int moving = static_cast<int>(uni(1.0, 5.0));
  for (int i = 0; i < moving; ++i) {
    const double lane = (U(rng) < 0.5 ? -1.0 : 1.0) * uni(1.5, std::max(1.6, road - 3.0));
    scene.boxes.push_back({uni(6.0, 60.0), lane, scene.ground_z + 0.2, uni(3.8, 4.8),
                           uni(1.6, 1.9), uni(1.3, 1.7), uni(-0.15, 0.15),
                           static_cast<float>(uni(0.05, 0.9))});
  }

  // Pedestrians on the sidewalks and occasionally crossing.
  const int peds = static_cast<int>(uni(4.0, 16.0));
  for (int i = 0; i < peds; ++i) {
    const double side = U(rng) < 0.5 ? -1.0 : 1.0;
    const double y = U(rng) < 0.8 ? side * (road + uni(0.5, walk - 0.5)) : uni(-road, road);
    scene.boxes.push_back({uni(3.0, 50.0), y, scene.ground_z, uni(0.5, 0.9), uni(0.4, 0.7),
                           uni(1.5, 1.9), uni(-std::numbers::pi, std::numbers::pi),
                           static_cast<float>(uni(0.1, 0.5))});
  }

  // Poles and tree trunks.
  const int poles = static_cast<int>(uni(8.0, 24.0));
  for (int i = 0; i < poles; ++i) {
    const double side = U(rng) < 0.5 ? -1.0 : 1.0;
    scene.poles.push_back({uni(-60.0, 70.0), side * (road + uni(0.3, 1.5)), uni(0.08, 0.35),
                           scene.ground_z, scene.ground_z + uni(3.0, 8.0),
                           static_cast<float>(uni(0.2, 0.7))});
  }
  return scene;
}

std::vector<double> hdl64_elevations(std::uint32_t beams) {
  std::vector<double> deg;
  if (beams == 64) {
    for (int i = 0; i < 32; ++i) deg.push_back(2.0 - i * (10.33 / 31.0));
    for (int i = 0; i < 32; ++i) deg.push_back(-8.83 - i * (15.5 / 31.0));
  } else {
    for (std::uint32_t i = 0; i < beams; ++i)
      deg.push_back(beams == 1 ? -8.0 : 2.0 - i * (26.9 / (beams - 1)));
  }
  for (auto& d : deg) d *= std::numbers::pi / 180.0;
  return deg;
}

}  // namespace

PointCloud simulate_scan(std::uint64_t seed, const ScanConfig& config) {
  std::mt19937_64 rng(seed);
  const Scene scene = make_scene(rng, config.sensor_height);
  std::normal_distribution<double> noise(0.0, config.range_noise);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  const auto elevations = hdl64_elevations(config.beams);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(config.beams) * config.azimuth_steps / 2);
  const double origin[3] = {0.0, 0.0, 0.0};

  for (std::uint32_t a = 0; a < config.azimuth_steps; ++a) {
    const double az = 2.0 * std::numbers::pi * a / config.azimuth_steps - std::numbers::pi;
    for (double el : elevations) {
      const double d[3] = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                           std::sin(el)};
      double best = kInf;
      float refl = 0.f;
      if (d[2] < 0.0) {
        best = scene.ground_z / d[2];
        refl = 0.f;  // filled below so the road texture varies per point
      }
      bool ground = std::isfinite(best);
      for (const auto& b : scene.boxes) {
        const double t = hit_box(b, origin, d);
        if (t < best) {
          best = t;
          refl = b.reflectance;
          ground = false;
        }
      }
      for (const auto& p : scene.poles) {
        const double t = hit_pole(p, origin, d);
        if (t < best) {
          best = t;
          refl = p.reflectance;
          ground = false;
        }
      }
      if (!(best <= config.max_range)) continue;
      // Returns get weaker and sparser with range.
      if (U(rng) < 0.02 + 0.1 * best / config.max_range) continue;

      const double range = best + noise(rng);
      double r = ground ? 0.05 + 0.25 * U(rng) : refl + 0.05 * (U(rng) - 0.5);
      r = std::clamp(r, 0.0, 1.0);
      cloud.points.push_back(Point{static_cast<float>(range * d[0]),
                                   static_cast<float>(range * d[1]),
                                   static_cast<float>(range * d[2]), static_cast<float>(r)});
    }
  }
  return cloud;
}

std::string_view reference_calibration_text() noexcept {
  return "P0: 7.070493000000e+02 0.000000000000e+00 6.040814000000e+02 0.000000000000e+00 "
         "0.000000000000e+00 7.070493000000e+02 1.805066000000e+02 0.000000000000e+00 "
         "0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00\n"
         "P1: 7.070493000000e+02 0.000000000000e+00 6.040814000000e+02 -3.797842000000e+02 "
         "0.000000000000e+00 7.070493000000e+02 1.805066000000e+02 0.000000000000e+00 "
         "0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00\n"
         "P2: 7.070493000000e+02 0.000000000000e+00 6.040814000000e+02 4.575831000000e+01 "
         "0.000000000000e+00 7.070493000000e+02 1.805066000000e+02 -3.454157000000e-01 "
         "0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 4.981016000000e-03\n"
         "P3: 7.070493000000e+02 0.000000000000e+00 6.040814000000e+02 -3.341081000000e+02 "
         "0.000000000000e+00 7.070493000000e+02 1.805066000000e+02 2.330660000000e+00 "
         "0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 3.201153000000e-03\n"
         "R0_rect: 9.999128000000e-01 1.009263000000e-02 -8.511932000000e-03 "
         "-1.012729000000e-02 9.999406000000e-01 -4.037671000000e-03 8.470675000000e-03 "
         "4.123522000000e-03 9.999556000000e-01\n"
         "Tr_velo_to_cam: 6.927964000000e-03 -9.999722000000e-01 -2.757829000000e-03 "
         "-2.457729000000e-02 -1.162982000000e-03 2.749836000000e-03 -9.999955000000e-01 "
         "-6.127237000000e-02 9.999753000000e-01 6.931141000000e-03 -1.143899000000e-03 "
         "-3.321029000000e-01\n"
         "Tr_imu_to_velo: 9.999976000000e-01 7.553071000000e-04 -2.035826000000e-03 "
         "-8.086759000000e-01 -7.854027000000e-04 9.998898000000e-01 -1.482298000000e-02 "
         "3.195559000000e-01 2.024406000000e-03 1.482454000000e-02 9.998881000000e-01 "
         "-7.997231000000e-01\n";
}

}  // namespace xview
