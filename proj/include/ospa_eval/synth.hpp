// Copyright 2026 The ospa_eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic synthetic sequences and a seeded noise model.
//
// Random stream contract (fixed so fixtures reproduce across
// implementations):
//   * state: xoshiro256** seeded with four consecutive splitmix64 outputs
//     starting from the user seed;
//   * uniform():       (next() >> 11) * 2^-53, in [0, 1);
//   * uniform_int(a,b): a + next() % (b - a + 1).
//
// generate() draws, in order: objects per thing class; a Fisher-Yates
// shuffle of grid cells; then per object height, width, top, left, vy, vx.
// perturb() draws exactly six uniforms per input segment (drop, shift
// direction, jitter sign, id switch, class flip, flip target) whether or not
// the stage fires, so the streams of two parameter settings stay aligned.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/error.hpp"
#include "ospa_eval/mask.hpp"

namespace ospa_eval {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

struct SynthParams {
  std::uint64_t seed = 0;
  std::size_t frames = 10;
  std::uint32_t height = 480;
  std::uint32_t width = 752;
  std::size_t thing_classes = 1;
  std::size_t stuff_classes = 1;
  std::size_t unknown_thing_classes = 0;  // the last N thing classes are "unknown"
  std::size_t objects_min = 1;            // per thing class
  std::size_t objects_max = 1;
  std::uint32_t size_min = 8;  // rectangle side, pixels
  std::uint32_t size_max = 32;
  std::uint32_t motion_step = 2;  // max |velocity| per axis, pixels/frame
  std::string sequence_id = "synthetic";
};

struct PerturbParams {
  double drop_prob = 0.0;
  double id_switch_prob = 0.0;
  double class_flip_prob = 0.0;
  std::uint32_t shift_px = 0;
  int iou_jitter = 0;  // |radius| of the erosion/dilation; sign drawn per segment
};

inline std::string synth_thing_name(std::size_t i) { return "thing_" + std::to_string(i); }
inline std::string synth_stuff_name(std::size_t i) { return "stuff_" + std::to_string(i); }

// Taxonomy matching the generator's class names. Always holds at least one
// thing and one stuff class.
inline Taxonomy synth_taxonomy(const SynthParams& p) {
  std::vector<ClassInfo> classes;
  const std::size_t things = std::max<std::size_t>(p.thing_classes, 1);
  const std::size_t stuff = std::max<std::size_t>(p.stuff_classes, 1);
  int id = 1;
  for (std::size_t i = 0; i < things; ++i) {
    const bool unknown = i + p.unknown_thing_classes >= things;
    classes.push_back({synth_thing_name(i), id++, ClassKind::thing, unknown ? ClassSplit::unknown : ClassSplit::known});
  }
  for (std::size_t i = 0; i < stuff; ++i) {
    classes.push_back({synth_stuff_name(i), id++, ClassKind::stuff, ClassSplit::known});
  }
  return Taxonomy(std::move(classes));
}

// Rectangular thing objects, each confined to its own grid cell and bouncing
// inside it, so thing masks never overlap. Stuff classes are horizontal bands
// behind the things (layer 1), which makes the frames multi-label wherever a
// thing covers a band.
inline SequenceAnnotation generate(const SynthParams& p) {
  if (p.objects_min > p.objects_max || p.size_min == 0 || p.size_min > p.size_max || p.height == 0 ||
      p.width == 0 || p.unknown_thing_classes > p.thing_classes || p.stuff_classes > p.height) {
    throw Error(ErrorKind::infeasible_params, "inconsistent synthetic parameters");
  }
  Rng rng(p.seed);
  std::vector<std::size_t> per_class(p.thing_classes);
  std::size_t total = 0;
  for (auto& n : per_class) {
    n = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(p.objects_min), static_cast<std::int64_t>(p.objects_max)));
    total += n;
  }

  std::size_t grid_cols = 1, grid_rows = 1;
  if (total > 0) {
    const double aspect = static_cast<double>(p.width) / static_cast<double>(p.height);
    grid_cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(total * aspect))));
    grid_rows = (total + grid_cols - 1) / grid_cols;
  }
  const std::uint32_t cell_w = static_cast<std::uint32_t>(p.width / grid_cols);
  const std::uint32_t cell_h = static_cast<std::uint32_t>(p.height / grid_rows);
  if (total > 0 && (p.size_max > cell_w || p.size_max > cell_h)) {
    throw Error(ErrorKind::infeasible_params, std::to_string(total) + " objects of side up to " +
                                                  std::to_string(p.size_max) + " do not fit in " +
                                                  std::to_string(cell_h) + "x" + std::to_string(cell_w) + " cells");
  }

  std::vector<std::size_t> cells(grid_cols * grid_rows);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::swap(cells[i - 1], cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
  }

  struct Object {
    std::size_t cls;
    std::int64_t id;
    std::int64_t cell_top, cell_left;
    std::int64_t h, w, top, left, vy, vx;
  };
  std::vector<Object> objects;
  objects.reserve(total);
  const auto step = static_cast<std::int64_t>(p.motion_step);
  for (std::size_t c = 0, k = 0; c < per_class.size(); ++c) {
    for (std::size_t n = 0; n < per_class[c]; ++n, ++k) {
      Object o{};
      o.cls = c;
      o.id = static_cast<std::int64_t>(k) + 1;
      o.cell_top = static_cast<std::int64_t>(cells[k] / grid_cols) * cell_h;
      o.cell_left = static_cast<std::int64_t>(cells[k] % grid_cols) * cell_w;
      o.h = rng.uniform_int(p.size_min, p.size_max);
      o.w = rng.uniform_int(p.size_min, p.size_max);
      o.top = o.cell_top + rng.uniform_int(0, cell_h - o.h);
      o.left = o.cell_left + rng.uniform_int(0, cell_w - o.w);
      o.vy = rng.uniform_int(-step, step);
      o.vx = rng.uniform_int(-step, step);
      objects.push_back(o);
    }
  }

  // Reflects a coordinate back into [lo, hi], flipping the velocity.
  auto bounce = [](std::int64_t& pos, std::int64_t& vel, std::int64_t lo, std::int64_t hi) {
    pos += vel;
    if (hi <= lo) {
      pos = lo;
      return;
    }
    while (pos < lo || pos > hi) {
      if (pos < lo) pos = 2 * lo - pos;
      if (pos > hi) pos = 2 * hi - pos;
      vel = -vel;
    }
  };

  std::vector<Mask> bands;
  for (std::size_t s = 0; s < p.stuff_classes; ++s) {
    const std::int64_t r0 = static_cast<std::int64_t>(s * p.height / p.stuff_classes);
    const std::int64_t r1 = static_cast<std::int64_t>((s + 1) * p.height / p.stuff_classes);
    bands.push_back(rectangle_mask(p.height, p.width, r0, 0, r1 - r0, p.width));
  }

  SequenceAnnotation seq{p.sequence_id, p.height, p.width, {}};
  seq.frames.reserve(p.frames);
  for (std::size_t t = 0; t < p.frames; ++t) {
    FrameAnnotation frame{static_cast<std::int64_t>(t), p.height, p.width, {}};
    frame.segments.reserve(objects.size() + bands.size());
    for (Object& o : objects) {
      if (t > 0) {
        bounce(o.top, o.vy, o.cell_top, o.cell_top + cell_h - o.h);
        bounce(o.left, o.vx, o.cell_left, o.cell_left + cell_w - o.w);
      }
      frame.segments.push_back(
          {rectangle_mask(p.height, p.width, o.top, o.left, o.h, o.w), synth_thing_name(o.cls), o.id, 0});
    }
    for (std::size_t s = 0; s < bands.size(); ++s) {
      frame.segments.push_back({bands[s], synth_stuff_name(s), std::nullopt, 1});
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

// Applies per-segment noise in the fixed stage order
//   drop -> shift -> jitter -> id switch -> class flip,
// then restores the per-frame invariants: overlapping thing masks of one
// class are trimmed in segment order, empty segments are removed, and
// colliding (class, track_id) pairs get fresh ids. Zero parameters return the
// input unchanged.
inline SequenceAnnotation perturb(const SequenceAnnotation& gt, const Taxonomy& taxonomy, const PerturbParams& p,
                                  std::uint64_t seed) {
  for (double prob : {p.drop_prob, p.id_switch_prob, p.class_flip_prob}) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorKind::config, "probabilities must lie in [0, 1]");
  }
  Rng rng(seed);
  std::map<ClassKind, std::vector<std::string>> by_kind;
  for (const ClassInfo& c : taxonomy.classes()) by_kind[c.kind].push_back(c.name);

  std::int64_t next_id = 0;
  for (const FrameAnnotation& f : gt.frames)
    for (const Segment& s : f.segments)
      if (s.track_id) next_id = std::max(next_id, *s.track_id);
  ++next_id;
  std::map<std::pair<std::string, std::int64_t>, std::int64_t> current_id;

  SequenceAnnotation out{gt.sequence_id, gt.height, gt.width, {}};
  out.frames.reserve(gt.frames.size());
  for (const FrameAnnotation& frame : gt.frames) {
    FrameAnnotation f{frame.frame_id, frame.height, frame.width, {}};
    for (const Segment& src : frame.segments) {
      const double u_drop = rng.uniform();
      const double u_dir = rng.uniform();
      const double u_sign = rng.uniform();
      const double u_switch = rng.uniform();
      const double u_flip = rng.uniform();
      const double u_target = rng.uniform();
      if (u_drop < p.drop_prob) continue;

      Segment s = src;
      if (p.shift_px > 0) {
        const auto d = static_cast<std::int64_t>(p.shift_px);
        static constexpr int dy[4] = {-1, 1, 0, 0};
        static constexpr int dx[4] = {0, 0, -1, 1};
        const int dir = std::min(3, static_cast<int>(u_dir * 4.0));
        s.mask = translate(s.mask, dy[dir] * d, dx[dir] * d);
      }
      if (p.iou_jitter != 0) {
        const int radius = std::abs(p.iou_jitter);
        s.mask = morph(s.mask, u_sign < 0.5 ? -radius : radius);
      }
      if (s.track_id && u_switch < p.id_switch_prob) {
        current_id[{s.class_name, *src.track_id}] = next_id++;
      }
      if (s.track_id) {
        auto it = current_id.find({s.class_name, *src.track_id});
        if (it != current_id.end()) s.track_id = it->second;
      }
      if (u_flip < p.class_flip_prob) {
        const ClassInfo& info = taxonomy.at(s.class_name);
        const auto& peers = by_kind[info.kind];
        if (peers.size() > 1) {
          const auto pick = std::min(peers.size() - 2, static_cast<std::size_t>(u_target * (peers.size() - 1)));
          const auto self = static_cast<std::size_t>(std::find(peers.begin(), peers.end(), s.class_name) - peers.begin());
          s.class_name = peers[pick >= self ? pick + 1 : pick];
        }
      }
      if (s.mask.area() > 0 || src.mask.area() == 0) f.segments.push_back(std::move(s));
    }

    std::map<std::string, Mask> claimed;
    std::set<std::pair<std::string, std::int64_t>> ids;
    std::vector<Segment> kept;
    kept.reserve(f.segments.size());
    for (Segment& s : f.segments) {
      if (taxonomy.at(s.class_name).is_thing()) {
        auto [it, fresh] = claimed.try_emplace(s.class_name, Mask::empty(f.height, f.width));
        if (!fresh) {
          Mask trimmed = mask_difference(s.mask, it->second);
          if (trimmed.area() == 0 && s.mask.area() > 0) continue;
          s.mask = std::move(trimmed);
        }
        it->second = mask_union(it->second, s.mask);
        if (s.track_id && !ids.emplace(s.class_name, *s.track_id).second) {
          s.track_id = next_id++;
          ids.emplace(s.class_name, *s.track_id);
        }
      }
      kept.push_back(std::move(s));
    }
    f.segments = std::move(kept);
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace ospa_eval
