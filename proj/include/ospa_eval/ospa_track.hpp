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

// Trajectory-level OSPA (OSPA^2) over mask tracks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/mask.hpp"
#include "ospa_eval/numeric.hpp"
#include "ospa_eval/ospa.hpp"

namespace ospa_eval {

// One labeled mask trajectory. Stuff classes get a single track per class
// with no id.
struct Track {
  std::string class_name;
  std::optional<std::int64_t> track_id;
  std::map<std::int64_t, Mask> observations;  // frame_id -> mask

  friend bool operator==(const Track&, const Track&) = default;
};

enum class TemporalWindow {
  union_of_domains,  // average over frames where either track exists
  full_sequence,     // average over every frame; frames with neither track add 0
};

inline constexpr std::string_view to_string(TemporalWindow w) {
  return w == TemporalWindow::union_of_domains ? "union" : "sequence";
}

struct TrackWindow {
  TemporalWindow kind = TemporalWindow::union_of_domains;
  std::size_t sequence_length = 0;  // used by full_sequence only
};

// Time-averaged distance: 1 - IoU on frames where both tracks exist, 1 where
// only one exists.
inline double track_distance(const Track& a, const Track& b, const TrackWindow& window = {}) {
  if (a.class_name != b.class_name) {
    throw Error(ErrorKind::class_mismatch, "'" + a.class_name + "' vs '" + b.class_name + "'");
  }
  CompensatedSum sum;
  std::size_t frames = 0;
  auto ia = a.observations.begin();
  auto ib = b.observations.begin();
  while (ia != a.observations.end() || ib != b.observations.end()) {
    ++frames;
    if (ib == b.observations.end() || (ia != a.observations.end() && ia->first < ib->first)) {
      sum.add(1.0);
      ++ia;
    } else if (ia == a.observations.end() || ib->first < ia->first) {
      sum.add(1.0);
      ++ib;
    } else {
      sum.add(1.0 - iou(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  if (window.kind == TemporalWindow::full_sequence) {
    if (window.sequence_length < frames) {
      throw Error(ErrorKind::invariant_violation, "track domain exceeds the sequence window");
    }
    frames = window.sequence_length;
  }
  return frames == 0 ? 0.0 : sum.value() / static_cast<double>(frames);
}

// Builds the track table of a sequence. Thing segments are grouped by
// (class, track_id); each stuff class becomes one synthetic track holding the
// per-frame union of its segments.
inline std::vector<Track> build_tracks(const SequenceAnnotation& seq, const Taxonomy& taxonomy,
                                       ClassSubset subset = ClassSubset::all) {
  std::map<std::pair<std::string, std::int64_t>, Track> things;
  std::map<std::string, Track> stuff;
  for (const FrameAnnotation& frame : seq.frames) {
    for (const Segment& s : frame.segments) {
      const ClassInfo* c = taxonomy.find(s.class_name);
      if (!c) {
        throw Error(ErrorKind::unknown_class, seq.sequence_id + " frame_id " + std::to_string(frame.frame_id) +
                                                  ": class '" + s.class_name + "' is not in the taxonomy");
      }
      if (!c->in(subset)) continue;
      if (c->is_stuff()) {
        Track& t = stuff.try_emplace(c->name, Track{c->name, std::nullopt, {}}).first->second;
        auto [it, inserted] = t.observations.try_emplace(frame.frame_id, s.mask);
        if (!inserted) it->second = mask_union(it->second, s.mask);
        continue;
      }
      if (!s.track_id) {
        throw Error(ErrorKind::missing_track_id, seq.sequence_id + " frame_id " + std::to_string(frame.frame_id) +
                                                     ": thing segment of class '" + c->name + "' has no track_id");
      }
      Track& t = things.try_emplace({c->name, *s.track_id}, Track{c->name, s.track_id, {}}).first->second;
      if (!t.observations.try_emplace(frame.frame_id, s.mask).second) {
        throw Error(ErrorKind::duplicate_track, seq.sequence_id + " frame_id " + std::to_string(frame.frame_id) +
                                                    ": track " + std::to_string(*s.track_id) + " of class '" +
                                                    c->name + "' appears twice");
      }
    }
  }
  std::vector<Track> out;
  out.reserve(things.size() + stuff.size());
  for (auto& [key, t] : things) out.push_back(std::move(t));
  for (auto& [name, t] : stuff) {
    std::erase_if(t.observations, [](const auto& kv) { return kv.second.area() == 0; });
    if (!t.observations.empty()) out.push_back(std::move(t));
  }
  return out;
}

struct TrackingOspa {
  std::map<std::string, OspaComponents> per_class;
  OspaComponents mean;
};

struct TrackingOptions {
  TemporalWindow window = TemporalWindow::union_of_domains;
  std::size_t workers = 1;
};

namespace detail {

// Keeps only prediction frames whose frame_id exists in the ground truth.
inline SequenceAnnotation restrict_to_frames(const SequenceAnnotation& pred, const std::set<std::int64_t>& ids) {
  SequenceAnnotation out{pred.sequence_id, pred.height, pred.width, {}};
  for (const FrameAnnotation& f : pred.frames) {
    if (ids.contains(f.frame_id)) out.frames.push_back(f);
  }
  return out;
}

}  // namespace detail

// OSPA over track sets per class, averaged over the classes present in either
// sequence.
inline TrackingOspa ospa2_pt(const SequenceAnnotation& gt, const SequenceAnnotation& pred, const Taxonomy& taxonomy,
                             ClassSubset subset = ClassSubset::all, const TrackingOptions& options = {}) {
  if (gt.height != pred.height || gt.width != pred.width) {
    throw Error(ErrorKind::dimension_mismatch, "sequence " + gt.sequence_id);
  }
  std::set<std::int64_t> frame_ids;
  for (const FrameAnnotation& f : gt.frames) {
    if (!frame_ids.insert(f.frame_id).second) {
      throw Error(ErrorKind::duplicate_frame, gt.sequence_id + " frame_id " + std::to_string(f.frame_id));
    }
  }
  const std::vector<Track> gt_tracks = build_tracks(gt, taxonomy, subset);
  const std::vector<Track> pred_tracks = build_tracks(detail::restrict_to_frames(pred, frame_ids), taxonomy, subset);

  std::map<std::string, std::pair<std::vector<const Track*>, std::vector<const Track*>>> by_class;
  for (const Track& t : gt_tracks) by_class[t.class_name].first.push_back(&t);
  for (const Track& t : pred_tracks) by_class[t.class_name].second.push_back(&t);

  std::vector<std::string> names;
  for (const auto& kv : by_class) names.push_back(kv.first);
  std::vector<OspaComponents> values(names.size());
  const TrackWindow window{options.window, gt.frames.size()};
  parallel_for(names.size(), options.workers, [&](std::size_t i) {
    const auto& [xs, ys] = by_class.at(names[i]);
    values[i] = ospa_distance(xs.size(), ys.size(),
                              [&](std::size_t a, std::size_t b) { return track_distance(*xs[a], *ys[b], window); });
  });

  TrackingOspa out;
  for (std::size_t i = 0; i < names.size(); ++i) out.per_class[names[i]] = values[i];
  out.mean = detail::mean_components(out.per_class, {});
  return out;
}

struct TrackingBreakdown {
  TrackingOspa all;
  TrackingOspa thing;
  TrackingOspa stuff;
  TrackingOspa known;
  TrackingOspa unknown;
};

// Per-class values do not depend on the subset, so the breakdowns are class
// selections of a single evaluation.
inline TrackingOspa select_classes(const TrackingOspa& all, const Taxonomy& taxonomy, ClassSubset subset) {
  TrackingOspa out;
  for (const auto& [name, c] : all.per_class) {
    if (taxonomy.at(name).in(subset)) out.per_class[name] = c;
  }
  out.mean = detail::mean_components(out.per_class, {});
  return out;
}

inline TrackingBreakdown ospa2_breakdowns(const SequenceAnnotation& gt, const SequenceAnnotation& pred,
                                          const Taxonomy& taxonomy, ClassSubset subset = ClassSubset::all,
                                          const TrackingOptions& options = {}) {
  TrackingBreakdown out;
  out.all = ospa2_pt(gt, pred, taxonomy, subset, options);
  out.thing = select_classes(out.all, taxonomy, ClassSubset::thing);
  out.stuff = select_classes(out.all, taxonomy, ClassSubset::stuff);
  out.known = select_classes(out.all, taxonomy, ClassSubset::known);
  out.unknown = select_classes(out.all, taxonomy, ClassSubset::unknown);
  return out;
}

}  // namespace ospa_eval
