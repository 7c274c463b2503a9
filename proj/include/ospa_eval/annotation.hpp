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

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ospa_eval/error.hpp"
#include "ospa_eval/mask.hpp"

namespace ospa_eval {

enum class ClassKind { thing, stuff };
enum class ClassSplit { known, unknown };

// Class filters used for every breakdown in a report.
enum class ClassSubset { all, thing, stuff, known, unknown };

inline constexpr std::string_view to_string(ClassKind k) { return k == ClassKind::thing ? "thing" : "stuff"; }
inline constexpr std::string_view to_string(ClassSplit s) { return s == ClassSplit::known ? "known" : "unknown"; }
inline constexpr std::string_view to_string(ClassSubset s) {
  switch (s) {
    case ClassSubset::all: return "all";
    case ClassSubset::thing: return "thing";
    case ClassSubset::stuff: return "stuff";
    case ClassSubset::known: return "known";
    case ClassSubset::unknown: return "unknown";
  }
  return "all";
}

inline std::optional<ClassSubset> parse_subset(std::string_view text) {
  for (ClassSubset s : {ClassSubset::all, ClassSubset::thing, ClassSubset::stuff, ClassSubset::known,
                        ClassSubset::unknown}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

struct ClassInfo {
  std::string name;
  int id = 0;
  ClassKind kind = ClassKind::thing;
  ClassSplit split = ClassSplit::known;

  bool is_thing() const noexcept { return kind == ClassKind::thing; }
  bool is_stuff() const noexcept { return kind == ClassKind::stuff; }

  bool in(ClassSubset subset) const noexcept {
    switch (subset) {
      case ClassSubset::all: return true;
      case ClassSubset::thing: return kind == ClassKind::thing;
      case ClassSubset::stuff: return kind == ClassKind::stuff;
      case ClassSubset::known: return split == ClassSplit::known;
      case ClassSubset::unknown: return split == ClassSplit::unknown;
    }
    return false;
  }

  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

// Case-folds and collapses runs of whitespace; used for alias lookups.
inline std::string normalize_class_name(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

class Taxonomy {
 public:
  Taxonomy() = default;

  // Throws ValidationError listing every problem found.
  explicit Taxonomy(std::vector<ClassInfo> classes, std::map<std::string, std::string> aliases = {})
      : classes_(std::move(classes)) {
    std::vector<Issue> issues;
    std::set<int> ids;
    bool any_thing = false;
    bool any_stuff = false;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      const ClassInfo& c = classes_[i];
      if (c.name.empty()) {
        issues.push_back({ErrorKind::schema, "class[" + std::to_string(i) + "] has an empty name"});
      }
      if (!by_name_.emplace(c.name, i).second) {
        issues.push_back({ErrorKind::duplicate_name, "duplicate class name '" + c.name + "'"});
      }
      if (!ids.insert(c.id).second) {
        issues.push_back({ErrorKind::duplicate_id, "duplicate class id " + std::to_string(c.id)});
      }
      normalized_.emplace(normalize_class_name(c.name), c.name);
      any_thing |= c.is_thing();
      any_stuff |= c.is_stuff();
    }
    if (!any_thing || !any_stuff) {
      issues.push_back({ErrorKind::invariant_violation, "taxonomy needs at least one thing and one stuff class"});
    }
    for (const auto& [alias, target] : aliases) {
      if (!by_name_.contains(target)) {
        issues.push_back({ErrorKind::unknown_alias_target,
                          "alias '" + alias + "' points at unknown class '" + target + "'"});
        continue;
      }
      aliases_.emplace(normalize_class_name(alias), target);
      raw_aliases_.emplace(alias, target);
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }

  const std::vector<ClassInfo>& classes() const noexcept { return classes_; }
  const std::map<std::string, std::string>& aliases() const noexcept { return raw_aliases_; }

  // Exact canonical-name lookup.
  const ClassInfo* find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : &classes_[it->second];
  }

  const ClassInfo& at(std::string_view name) const {
    if (const ClassInfo* c = find(name)) return *c;
    throw Error(ErrorKind::unknown_class, "class '" + std::string(name) + "' is not in the taxonomy");
  }

  // Maps a free-form name to its canonical class: exact match first, then the
  // normalized canonical names, then the normalized alias table.
  std::optional<std::string> resolve(std::string_view raw) const {
    if (find(raw)) return std::string(raw);
    const std::string key = normalize_class_name(raw);
    if (auto it = normalized_.find(key); it != normalized_.end()) return it->second;
    if (auto it = aliases_.find(key); it != aliases_.end()) return it->second;
    return std::nullopt;
  }

  // (known, unknown) class counts.
  std::pair<std::size_t, std::size_t> partition_sizes() const {
    std::size_t known = 0;
    for (const ClassInfo& c : classes_) known += c.split == ClassSplit::known ? 1 : 0;
    return {known, classes_.size() - known};
  }

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
    return a.classes_ == b.classes_ && a.raw_aliases_ == b.raw_aliases_;
  }

 private:
  std::vector<ClassInfo> classes_;
  std::map<std::string, std::size_t> by_name_;
  std::map<std::string, std::string> normalized_;
  std::map<std::string, std::string> aliases_;
  std::map<std::string, std::string> raw_aliases_;
};

// One labeled region in a frame. Segments of different classes may overlap to
// express multi-label pixels; `layer` orders them front (0) to back.
struct Segment {
  Mask mask;
  std::string class_name;
  std::optional<std::int64_t> track_id;
  int layer = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct FrameAnnotation {
  std::int64_t frame_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<Segment> segments;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

struct SequenceAnnotation {
  std::string sequence_id;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<FrameAnnotation> frames;

  friend bool operator==(const SequenceAnnotation&, const SequenceAnnotation&) = default;
};

// Drops segments whose class falls outside the subset. Frames are kept even
// when they end up empty. Unknown class names are dropped as well.
inline FrameAnnotation filter_subset(const FrameAnnotation& frame, const Taxonomy& taxonomy, ClassSubset subset) {
  if (subset == ClassSubset::all) return frame;
  FrameAnnotation out{frame.frame_id, frame.height, frame.width, {}};
  for (const Segment& s : frame.segments) {
    const ClassInfo* c = taxonomy.find(s.class_name);
    if (c && c->in(subset)) out.segments.push_back(s);
  }
  return out;
}

inline SequenceAnnotation filter_subset(const SequenceAnnotation& seq, const Taxonomy& taxonomy,
                                        ClassSubset subset) {
  SequenceAnnotation out{seq.sequence_id, seq.height, seq.width, {}};
  out.frames.reserve(seq.frames.size());
  for (const FrameAnnotation& f : seq.frames) out.frames.push_back(filter_subset(f, taxonomy, subset));
  return out;
}

// Gt/pred frame correspondence by frame_id. A gt frame without a prediction is
// paired with an empty frame.
struct FramePair {
  FrameAnnotation gt;
  FrameAnnotation pred;
};

struct AlignedFrames {
  std::vector<FramePair> pairs;
  std::vector<std::string> warnings;
};

inline AlignedFrames align_frames(const std::vector<FrameAnnotation>& gt, const std::vector<FrameAnnotation>& pred,
                                  std::string_view context = {}) {
  const std::string where = context.empty() ? std::string() : std::string(context) + ": ";
  std::map<std::int64_t, const FrameAnnotation*> pred_by_id;
  for (const FrameAnnotation& f : pred) {
    if (!pred_by_id.emplace(f.frame_id, &f).second) {
      throw Error(ErrorKind::duplicate_frame, where + "prediction frame_id " + std::to_string(f.frame_id));
    }
  }
  AlignedFrames out;
  std::set<std::int64_t> gt_ids;
  out.pairs.reserve(gt.size());
  for (const FrameAnnotation& f : gt) {
    if (!gt_ids.insert(f.frame_id).second) {
      throw Error(ErrorKind::duplicate_frame, where + "ground-truth frame_id " + std::to_string(f.frame_id));
    }
    auto it = pred_by_id.find(f.frame_id);
    if (it == pred_by_id.end()) {
      out.pairs.push_back({f, FrameAnnotation{f.frame_id, f.height, f.width, {}}});
      continue;
    }
    if (it->second->height != f.height || it->second->width != f.width) {
      throw Error(ErrorKind::dimension_mismatch, where + "frame_id " + std::to_string(f.frame_id));
    }
    out.pairs.push_back({f, *it->second});
  }
  for (const auto& [id, frame] : pred_by_id) {
    if (!gt_ids.contains(id)) {
      out.warnings.push_back(where + "prediction frame_id " + std::to_string(id) +
                             " has no ground-truth frame and was ignored");
    }
  }
  return out;
}

}  // namespace ospa_eval
