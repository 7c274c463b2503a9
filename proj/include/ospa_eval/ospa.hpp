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

// OSPA set distance over masks and its class-averaged panoptic form.
//
// For sets X (|X| = m) and Y (|Y| = n) with m <= n, cutoff 1 and order 1:
//
//   loc   = min over injections pi of sum_i d(x_i, y_pi(i)) / n
//   card  = (n - m) / n
//   total = loc + card
//
// with base distance d = 1 - IoU. Two empty sets are at distance 0; a single
// empty set is at distance 1 (all cardinality).

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/assignment.hpp"
#include "ospa_eval/mask.hpp"
#include "ospa_eval/numeric.hpp"

namespace ospa_eval {

struct OspaComponents {
  double total = 0.0;
  double loc = 0.0;
  double card = 0.0;

  friend bool operator==(const OspaComponents&, const OspaComponents&) = default;
};

// Generic OSPA over index sets of size m and n. `distance(i, j)` is the base
// distance between element i of the first set and element j of the second;
// values above the cutoff of 1 are clamped.
template <class Distance>
OspaComponents ospa_distance(std::size_t m, std::size_t n, Distance&& distance) {
  if (m == 0 && n == 0) return {};
  if (m == 0 || n == 0) return {1.0, 0.0, 1.0};
  CostMatrix cost(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost.set(i, j, std::clamp(distance(i, j), 0.0, 1.0));
  }
  const AssignmentResult match = solve_assignment(cost);
  const double larger = static_cast<double>(std::max(m, n));
  const double smaller = static_cast<double>(std::min(m, n));
  OspaComponents out;
  out.loc = match.total_cost / larger;
  out.card = (larger - smaller) / larger;
  out.total = out.loc + out.card;
  return out;
}

inline OspaComponents ospa_set_distance(std::span<const Mask> x, std::span<const Mask> y) {
  const Mask* ref = !x.empty() ? &x.front() : (!y.empty() ? &y.front() : nullptr);
  if (ref) {
    for (const Mask& mk : x) require_same_shape(*ref, mk);
    for (const Mask& mk : y) require_same_shape(*ref, mk);
  }
  return ospa_distance(x.size(), y.size(), [&](std::size_t i, std::size_t j) { return 1.0 - iou(x[i], y[j]); });
}

// Per-class mask sets of one frame. Thing classes contribute one mask per
// segment; a stuff class contributes the union of its segments as a single
// class-level mask.
using ClassMaskSets = std::map<std::string, std::vector<Mask>>;
using SegmentFilter = std::function<bool(const Segment&)>;

inline ClassMaskSets class_mask_sets(const FrameAnnotation& frame, const Taxonomy& taxonomy, ClassSubset subset,
                                     const SegmentFilter& keep = {}) {
  ClassMaskSets sets;
  std::map<std::string, Mask> stuff;
  for (const Segment& s : frame.segments) {
    const ClassInfo* c = taxonomy.find(s.class_name);
    if (!c) {
      throw Error(ErrorKind::unknown_class, "frame_id " + std::to_string(frame.frame_id) + ": class '" +
                                                s.class_name + "' is not in the taxonomy");
    }
    if (!c->in(subset) || (keep && !keep(s))) continue;
    if (c->is_thing()) {
      sets[c->name].push_back(s.mask);
    } else if (auto it = stuff.find(c->name); it == stuff.end()) {
      stuff.emplace(c->name, s.mask);
    } else {
      it->second = mask_union(it->second, s.mask);
    }
  }
  for (auto& [name, m] : stuff) {
    if (m.area() > 0) sets[name].push_back(std::move(m));
  }
  return sets;
}

struct FrameOspa {
  std::map<std::string, OspaComponents> per_class;
  OspaComponents mean;
};

namespace detail {

inline OspaComponents mean_components(const std::map<std::string, OspaComponents>& per_class,
                                      const std::function<bool(const std::string&)>& include) {
  CompensatedSum total, loc, card;
  std::size_t n = 0;
  for (const auto& [name, c] : per_class) {
    if (include && !include(name)) continue;
    total.add(c.total);
    loc.add(c.loc);
    card.add(c.card);
    ++n;
  }
  if (n == 0) return {};
  const double d = static_cast<double>(n);
  return {total.value() / d, loc.value() / d, card.value() / d};
}

}  // namespace detail

// Class-averaged OSPA of one frame. The class set is every class in the subset
// that appears in either frame.
inline FrameOspa ospa_ps(const FrameAnnotation& gt, const FrameAnnotation& pred, const Taxonomy& taxonomy,
                         ClassSubset subset = ClassSubset::all, const SegmentFilter& gt_keep = {},
                         const SegmentFilter& pred_keep = {}) {
  if (gt.height != pred.height || gt.width != pred.width) {
    throw Error(ErrorKind::dimension_mismatch, "frame_id " + std::to_string(gt.frame_id));
  }
  const ClassMaskSets x = class_mask_sets(gt, taxonomy, subset, gt_keep);
  const ClassMaskSets y = class_mask_sets(pred, taxonomy, subset, pred_keep);
  static const std::vector<Mask> none;
  FrameOspa out;
  auto visit = [&](const std::string& name) {
    if (out.per_class.contains(name)) return;
    auto xi = x.find(name);
    auto yi = y.find(name);
    out.per_class[name] = ospa_set_distance(xi == x.end() ? none : xi->second, yi == y.end() ? none : yi->second);
  };
  for (const auto& [name, masks] : x) visit(name);
  for (const auto& [name, masks] : y) visit(name);
  out.mean = detail::mean_components(out.per_class, {});
  return out;
}

struct ClassAggregate {
  OspaComponents value;
  std::size_t frames = 0;  // frames in which the class was evaluated
};

struct SegmentationOspa {
  OspaComponents overall;
  OspaComponents thing;
  OspaComponents stuff;
  std::map<std::string, ClassAggregate> per_class;
  std::size_t frames = 0;
};

struct EvalOptions {
  std::size_t workers = 1;
};

// Dataset-level OSPA: per-frame class means averaged over all gt frames. The
// thing and stuff aggregates use the same frame average restricted to the
// respective classes, so frames without such classes count as 0.
inline SegmentationOspa ospa_ps_dataset(const std::vector<FramePair>& pairs, const Taxonomy& taxonomy,
                                        ClassSubset subset = ClassSubset::all, const EvalOptions& options = {},
                                        const SegmentFilter& keep = {}) {
  std::vector<FrameOspa> per_frame(pairs.size());
  parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
    per_frame[i] = ospa_ps(pairs[i].gt, pairs[i].pred, taxonomy, subset, keep, keep);
  });

  auto is_kind = [&](ClassKind kind) {
    return [&taxonomy, kind](const std::string& name) { return taxonomy.at(name).kind == kind; };
  };
  CompensatedSum sums[9];
  struct ClassSums {
    CompensatedSum total, loc, card;
    std::size_t frames = 0;
  };
  std::map<std::string, ClassSums> class_sums;
  for (const FrameOspa& f : per_frame) {
    const OspaComponents parts[3] = {f.mean, detail::mean_components(f.per_class, is_kind(ClassKind::thing)),
                                     detail::mean_components(f.per_class, is_kind(ClassKind::stuff))};
    for (int k = 0; k < 3; ++k) {
      sums[3 * k].add(parts[k].total);
      sums[3 * k + 1].add(parts[k].loc);
      sums[3 * k + 2].add(parts[k].card);
    }
    for (const auto& [name, c] : f.per_class) {
      ClassSums& cs = class_sums[name];
      cs.total.add(c.total);
      cs.loc.add(c.loc);
      cs.card.add(c.card);
      ++cs.frames;
    }
  }
  SegmentationOspa out;
  out.frames = pairs.size();
  if (!pairs.empty()) {
    const double n = static_cast<double>(pairs.size());
    auto at = [&](int k) -> OspaComponents {
      return {sums[3 * k].value() / n, sums[3 * k + 1].value() / n, sums[3 * k + 2].value() / n};
    };
    out.overall = at(0);
    out.thing = at(1);
    out.stuff = at(2);
  }
  for (const auto& [name, cs] : class_sums) {
    const double n = static_cast<double>(cs.frames);
    out.per_class[name] = {{cs.total.value() / n, cs.loc.value() / n, cs.card.value() / n}, cs.frames};
  }
  return out;
}

inline SegmentationOspa ospa_ps_dataset(const std::vector<FrameAnnotation>& gt, const std::vector<FrameAnnotation>& pred,
                                        const Taxonomy& taxonomy, ClassSubset subset = ClassSubset::all,
                                        const EvalOptions& options = {}) {
  return ospa_ps_dataset(align_frames(gt, pred).pairs, taxonomy, subset, options);
}

// Area buckets: small <= 32^2, medium in (32^2, 96^2], large > 96^2.
enum class ScaleBucket { small, medium, large };

inline constexpr std::uint64_t kSmallMaxArea = 32 * 32;
inline constexpr std::uint64_t kMediumMaxArea = 96 * 96;

inline constexpr ScaleBucket scale_bucket(std::uint64_t area) {
  if (area <= kSmallMaxArea) return ScaleBucket::small;
  if (area <= kMediumMaxArea) return ScaleBucket::medium;
  return ScaleBucket::large;
}

inline constexpr std::string_view to_string(ScaleBucket b) {
  switch (b) {
    case ScaleBucket::small: return "small";
    case ScaleBucket::medium: return "medium";
    case ScaleBucket::large: return "large";
  }
  return "small";
}

struct ScaleBreakdown {
  SegmentationOspa small;
  SegmentationOspa medium;
  SegmentationOspa large;
};

// Both sides are filtered by each segment's own area before the per-class
// sets are built, so a gt mask and its prediction can land in different
// buckets.
inline ScaleBreakdown ospa_ps_by_scale(const std::vector<FramePair>& pairs, const Taxonomy& taxonomy,
                                       ClassSubset subset = ClassSubset::all, const EvalOptions& options = {}) {
  auto bucket_filter = [](ScaleBucket b) {
    return SegmentFilter([b](const Segment& s) { return scale_bucket(s.mask.area()) == b; });
  };
  return {ospa_ps_dataset(pairs, taxonomy, subset, options, bucket_filter(ScaleBucket::small)),
          ospa_ps_dataset(pairs, taxonomy, subset, options, bucket_filter(ScaleBucket::medium)),
          ospa_ps_dataset(pairs, taxonomy, subset, options, bucket_filter(ScaleBucket::large))};
}

}  // namespace ospa_eval
