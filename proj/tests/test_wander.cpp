/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The bletrack Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "bletrack/error.hpp"
#include "bletrack/wander.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace bletrack;
using Catch::Approx;

namespace {

// Triangle wave along x in [x0, x0 + len], sampled at hz.
Trajectory pacing(double len, double speed, double duration, double hz = 10.0, double x0 = 0.0,
                  double t0 = 0.0) {
  Trajectory tr{"T1", {}};
  const double period = 2.0 * len / speed;
  const auto n = static_cast<long>(std::floor(duration * hz + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / hz;
    const double phase = std::fmod(t, period) * speed;
    const double x = phase <= len ? phase : 2.0 * len - phase;
    tr.points.push_back({t0 + t, x0 + x, 0.0});
  }
  return tr;
}

Trajectory random_walk(std::mt19937_64& rng, int n, double step) {
  std::normal_distribution<double> d(0.0, step);
  std::uniform_real_distribution<double> dt(0.0, 2.0);
  Trajectory tr{"T1", {{0, 0, 0}}};
  for (int i = 1; i < n; ++i) {
    const auto& p = tr.points.back();
    tr.points.push_back({p.t + dt(rng), p.x + d(rng), p.y + d(rng)});
  }
  return tr;
}

double covered(const Detection& d) {
  double s = 0.0;
  for (const auto& e : d.episodes)
    s += e.end_t - e.start_t;
  return s;
}

} // namespace

TEST_CASE("path_length", "[wander]") {
  CHECK(path_length(Trajectory{"T1", {{0, 1, 1}}}) == 0.0);
  const Trajectory square{"T1", {{0, 0, 0}, {1, 1, 0}, {2, 1, 1}, {3, 0, 1}, {4, 0, 0}}};
  CHECK(path_length(square) == Approx(4.0));

  // 7 m legs at 0.7 m/s turn every 10 s, on the sample grid: 400 m is
  // 57.14 traversals, 571.43 s.
  const auto walk = pacing(7.0, 0.7, 400.0 / 0.7);
  CHECK(std::abs(path_length(walk) - 400.0) <= 0.5);
}

TEST_CASE("spatial_extent", "[wander]") {
  CHECK(spatial_extent(Trajectory{"T1", {{0, 4, 4}}}) == 0.0);
  CHECK(spatial_extent(Trajectory{"T1", {{0, 0, 0}, {1, 3, 4}}}) == Approx(5.0));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lateral(-0.5, 0.5);
  auto walk = pacing(7.0, 0.7, 120.0);
  for (auto& p : walk.points)
    p.y = lateral(rng);
  // Oracle: bounding box computed directly.
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (const auto& p : walk.points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double ext = spatial_extent(walk);
  CHECK(ext == Approx(std::hypot(xmax - xmin, ymax - ymin)));
  CHECK(ext >= 7.0);
  CHECK(ext <= 7.2);
}

TEST_CASE("summarize", "[wander]") {
  const auto one = summarize(Trajectory{"T1", {{5, 1, 1}}});
  CHECK(one.length_m == 0.0);
  CHECK(one.duration_s == 0.0);
  CHECK(one.extent_m == 0.0);
  CHECK(one.loiter_ratio == 0.0);

  const Trajectory square{"T1", {{0, 0, 0}, {1, 1, 0}, {2, 1, 1}, {3, 0, 1}, {4, 0, 0}}};
  const auto s = summarize(square);
  CHECK(s.length_m == Approx(4.0));
  CHECK(s.duration_s == Approx(4.0));
  CHECK(s.extent_m == Approx(std::sqrt(2.0)));
  CHECK(s.loiter_ratio == Approx(4.0 / std::sqrt(2.0)));

  const auto five_minutes = summarize(pacing(11.0, 0.8333, 300.0));
  CHECK(five_minutes.duration_s == Approx(300.0));
  CHECK(five_minutes.length_m == Approx(250.0).epsilon(0.25));
}

TEST_CASE("detect_episodes examples", "[wander]") {
  Trajectory straight{"T1", {}};
  for (int k = 0; k <= 1200; ++k)
    straight.points.push_back({k / 10.0, 100.0 * k / 1200.0, 0.0});
  const auto s = detect_episodes(straight);
  CHECK_FALSE(s.too_short);
  CHECK(s.episodes.empty());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> jitter(0.0, 0.01);
  Trajectory still{"T1", {}};
  for (int k = 0; k <= 600; ++k)
    still.points.push_back({static_cast<double>(k), 5.0 + jitter(rng), 5.0 + jitter(rng)});
  CHECK(detect_episodes(still).episodes.empty());

  const auto short_walk = pacing(7.0, 0.7, 60.0);
  const auto d = detect_episodes(short_walk);
  CHECK(d.too_short);
  CHECK(d.episodes.empty());

  const auto ten_minutes = pacing(7.0, 0.6667, 600.0, 1.0);
  const auto ep = detect_episodes(ten_minutes);
  REQUIRE(ep.episodes.size() == 1);
  CHECK(ep.episodes[0].end_t - ep.episodes[0].start_t >= 0.8 * 600.0);
  CHECK(ep.episodes[0].distance_m == Approx(400.0).epsilon(0.25));
  CHECK(ep.episodes[0].mean_speed_mps == Approx(0.6667).epsilon(0.05));
}

TEST_CASE("episodes inside a longer trajectory", "[wander]") {
  // Straight walk, then 300 s of pacing, then more walking.
  Trajectory tr{"T1", {}};
  for (int k = 0; k < 200; ++k)
    tr.points.push_back({static_cast<double>(k), 0.5 * k, 0.0});
  const auto pace = pacing(6.0, 0.75, 300.0, 1.0, 100.0, 200.0);
  tr.points.insert(tr.points.end(), pace.points.begin(), pace.points.end());
  const auto& last = tr.points.back();
  for (int k = 1; k <= 200; ++k)
    tr.points.push_back({last.t + k, last.x + 0.5 * k, 0.0});

  const auto d = detect_episodes(tr);
  REQUIRE(d.episodes.size() == 1);
  const auto& ep = d.episodes[0];
  CHECK(ep.start_t >= 150.0);
  CHECK(ep.end_t <= 560.0);
  CHECK(ep.start_t <= 210.0);
  CHECK(ep.end_t >= 490.0);
  CHECK(ep.distance_m >= 40.0);
  CHECK(ep.tag_id == "T1");
}

TEST_CASE("path_length is additive at a shared endpoint", "[wander][property]") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto a = random_walk(rng, 2 + static_cast<int>(rng() % 50), 1.0);
    auto b = random_walk(rng, 2 + static_cast<int>(rng() % 50), 1.0);
    const auto& join = a.points.back();
    const double dx = join.x - b.points.front().x, dy = join.y - b.points.front().y;
    const double dt = join.t - b.points.front().t;
    for (auto& p : b.points) {
      p.x += dx;
      p.y += dy;
      p.t += dt;
    }
    Trajectory cat = a;
    cat.points.insert(cat.points.end(), b.points.begin() + 1, b.points.end());
    CHECK(path_length(cat) == Approx(path_length(a) + path_length(b)).epsilon(1e-12));
  }
}

TEST_CASE("path_length bounds displacement", "[wander][property]") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto tr = random_walk(rng, 1 + static_cast<int>(rng() % 100), 3.0);
    const auto& f = tr.points.front();
    const auto& l = tr.points.back();
    CHECK(path_length(tr) >= std::hypot(l.x - f.x, l.y - f.y) - 1e-12);
  }
}

TEST_CASE("spatial_extent translation and insertion", "[wander][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 300; ++i) {
    auto tr = random_walk(rng, 1 + static_cast<int>(rng() % 60), 2.0);
    const double ext = spatial_extent(tr);
    Trajectory moved = tr;
    const double ox = u(rng), oy = u(rng);
    for (auto& p : moved.points) {
      p.x += ox;
      p.y += oy;
    }
    CHECK(spatial_extent(moved) == Approx(ext).margin(1e-9));

    Trajectory grown = tr;
    const auto at = grown.points.begin() + static_cast<long>(rng() % grown.points.size());
    grown.points.insert(at, TrackPoint{at->t, u(rng), u(rng)});
    CHECK(spatial_extent(grown) >= ext);
  }
}

TEST_CASE("detector output is well formed", "[wander][property]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> len(3.0, 15.0);
  std::uniform_real_distribution<double> speed(0.1, 1.5);
  std::uniform_real_distribution<double> dur(20.0, 400.0);
  for (int i = 0; i < 40; ++i) {
    // Alternate pacing and straight transit segments.
    Trajectory tr{"T1", {{0, 0, 0}}};
    for (int seg = 0; seg < 4; ++seg) {
      const auto& last = tr.points.back();
      if (seg % 2 == 0) {
        const auto p = pacing(len(rng), speed(rng), dur(rng), 1.0, last.x, last.t);
        tr.points.insert(tr.points.end(), p.points.begin() + 1, p.points.end());
      } else {
        const double v = speed(rng);
        const auto n = static_cast<int>(dur(rng));
        const TrackPoint base = last;
        for (int k = 1; k <= n; ++k)
          tr.points.push_back({base.t + k, base.x + v * k, base.y});
      }
    }
    const DetectorParams params;
    const auto d = detect_episodes(tr, params);
    for (std::size_t k = 0; k < d.episodes.size(); ++k) {
      const auto& e = d.episodes[k];
      CHECK(e.end_t > e.start_t);
      CHECK(e.distance_m >= params.min_distance_m);
      if (k > 0)
        CHECK(e.start_t > d.episodes[k - 1].end_t);
    }
  }
}

TEST_CASE("detector is monotone in min_distance", "[wander][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> len(3.0, 12.0);
  std::uniform_real_distribution<double> speed(0.2, 1.2);
  std::uniform_real_distribution<double> dur(150.0, 600.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int i = 0; i < 30; ++i) {
    // One pacing bout at constant speed with position noise, padded with
    // still periods.
    Trajectory tr{"T1", {}};
    for (int k = 0; k < 100; ++k)
      tr.points.push_back({static_cast<double>(k), 2.0 + noise(rng), noise(rng)});
    const auto p = pacing(len(rng), speed(rng), dur(rng), 1.0, 2.0, 100.0);
    for (auto pt : p.points) {
      pt.x += noise(rng);
      pt.y += noise(rng);
      pt.t += 1.0;
      tr.points.push_back(pt);
    }
    const TrackPoint end = tr.points.back();
    for (int k = 1; k <= 100; ++k)
      tr.points.push_back({end.t + k, end.x + noise(rng), end.y + noise(rng)});

    DetectorParams params;
    std::size_t prev_count = SIZE_MAX;
    double prev_cover = 1e18;
    for (double m : {0.0, 10.0, 20.0, 40.0, 60.0, 80.0, 120.0, 200.0}) {
      params.min_distance_m = m;
      const auto d = detect_episodes(tr, params);
      CHECK(d.episodes.size() <= prev_count);
      CHECK(covered(d) <= prev_cover + 1e-9);
      prev_count = d.episodes.size();
      prev_cover = covered(d);
    }
  }
}

TEST_CASE("covered time is monotone even where the count is not", "[wander]") {
  // Brisk pacing, a 200 s stretch that clears 40 m per window but not 42 m,
  // then brisk pacing again. Raising the threshold splits one episode in two.
  Trajectory tr{"T1", {}};
  auto append = [&](double len, double speed, double duration) {
    const double t0 = tr.points.empty() ? 0.0 : tr.points.back().t;
    const auto p = pacing(len, speed, duration, 1.0, 0.0, t0);
    tr.points.insert(tr.points.end(), p.points.begin() + (tr.points.empty() ? 0 : 1), p.points.end());
  };
  append(6.0, 0.75, 240.0);
  append(6.0, 41.0 / 120.0, 240.0);
  append(6.0, 0.75, 240.0);

  DetectorParams low;
  DetectorParams high;
  high.min_distance_m = 42.0;
  const auto a = detect_episodes(tr, low);
  const auto b = detect_episodes(tr, high);
  CHECK(a.episodes.size() == 1);
  CHECK(b.episodes.size() == 2);
  CHECK(covered(b) <= covered(a));
}

TEST_CASE("detector parameter validation", "[wander]") {
  DetectorParams p;
  CHECK_NOTHROW(p.validate());
  p.window_s = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.stride_s = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.min_distance_m = -5;
  CHECK_THROWS_AS(detect_episodes(pacing(7, 0.7, 200), p), Error);
}
