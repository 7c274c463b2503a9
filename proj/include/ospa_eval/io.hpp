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

// JSON file formats.
//
//   RLE:       {"size": [h, w], "counts": [int, ...]}
//   Sequence:  {"sequence": str, "height": int, "width": int,
//               "frames": [{"frame_id": int,
//                           "segments": [{"class": str, "track_id": int|null,
//                                         "layer": int, "rle": RLE}]}]}
//   Taxonomy:  {"classes": [{"name": str, "id": int, "kind": "thing"|"stuff",
//                            "split": "known"|"unknown"}],
//               "aliases": {str: str}}
//   Manifest:  {"dataset": str, "sequences": [{"id": str, "path": str}]}
//
// Manifest paths are resolved relative to the manifest's directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/error.hpp"
#include "ospa_eval/mask.hpp"

namespace ospa_eval {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
}

inline bool is_non_negative_integer(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

// ---------------------------------------------------------------------------
// RLE

inline json mask_to_json(const Mask& m) {
  return json{{"size", {m.height(), m.width()}}, {"counts", m.counts()}};
}

inline Mask mask_from_json(const json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("counts")) {
    throw Error(ErrorKind::schema, "rle must be an object with 'size' and 'counts'");
  }
  const json& size = j.at("size");
  if (!size.is_array() || size.size() != 2 || !is_non_negative_integer(size[0]) ||
      !is_non_negative_integer(size[1])) {
    throw Error(ErrorKind::schema, "rle 'size' must be [height, width] of non-negative integers");
  }
  const json& counts = j.at("counts");
  if (!counts.is_array()) throw Error(ErrorKind::schema, "rle 'counts' must be an array");
  std::vector<Mask::Count> values;
  values.reserve(counts.size());
  for (const json& c : counts) {
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0 ||
        c.get<std::int64_t>() > std::numeric_limits<Mask::Count>::max()) {
      throw Error(ErrorKind::malformed_counts, "counts must be non-negative integers");
    }
    values.push_back(c.get<Mask::Count>());
  }
  return Mask(size[0].get<std::uint32_t>(), size[1].get<std::uint32_t>(), std::move(values));
}

// ---------------------------------------------------------------------------
// Taxonomy

inline Taxonomy parse_taxonomy(const json& j) {
  std::vector<Issue> issues;
  if (!j.is_object() || !j.contains("classes") || !j.at("classes").is_array()) {
    throw ValidationError({{ErrorKind::schema, "taxonomy must be an object with a 'classes' array"}});
  }
  std::vector<ClassInfo> classes;
  const json& arr = j.at("classes");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& c = arr[i];
    const std::string where = "classes[" + std::to_string(i) + "]";
    if (!c.is_object() || !c.contains("name") || !c.at("name").is_string() || !c.contains("id") ||
        !c.at("id").is_number_integer()) {
      issues.push_back({ErrorKind::schema, where + " needs a string 'name' and an integer 'id'"});
      continue;
    }
    ClassInfo info;
    info.name = c.at("name").get<std::string>();
    info.id = c.at("id").get<int>();
    const std::string kind = c.value("kind", "");
    const std::string split = c.value("split", "");
    if (kind == "thing") {
      info.kind = ClassKind::thing;
    } else if (kind == "stuff") {
      info.kind = ClassKind::stuff;
    } else {
      issues.push_back({ErrorKind::bad_kind, where + " ('" + info.name + "') has kind '" + kind + "'"});
    }
    if (split == "known") {
      info.split = ClassSplit::known;
    } else if (split == "unknown") {
      info.split = ClassSplit::unknown;
    } else {
      issues.push_back({ErrorKind::bad_split, where + " ('" + info.name + "') has split '" + split + "'"});
    }
    classes.push_back(std::move(info));
  }
  std::map<std::string, std::string> aliases;
  if (j.contains("aliases")) {
    if (!j.at("aliases").is_object()) {
      issues.push_back({ErrorKind::schema, "'aliases' must be an object of strings"});
    } else {
      for (const auto& [k, v] : j.at("aliases").items()) {
        if (!v.is_string()) {
          issues.push_back({ErrorKind::schema, "alias '" + k + "' must map to a string"});
          continue;
        }
        aliases.emplace(k, v.get<std::string>());
      }
    }
  }
  std::optional<Taxonomy> taxonomy;
  try {
    taxonomy.emplace(std::move(classes), std::move(aliases));
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return std::move(*taxonomy);
}

inline Taxonomy load_taxonomy(const std::filesystem::path& path) { return parse_taxonomy(read_json_file(path)); }

inline json taxonomy_to_json(const Taxonomy& t) {
  json classes = json::array();
  for (const ClassInfo& c : t.classes()) {
    classes.push_back(
        {{"name", c.name}, {"id", c.id}, {"kind", to_string(c.kind)}, {"split", to_string(c.split)}});
  }
  return json{{"classes", classes}, {"aliases", t.aliases()}};
}

// ---------------------------------------------------------------------------
// Sequences

enum class AnnotationMode {
  tracking,      // thing segments must carry a track_id
  segmentation,  // track ids optional
};

enum class Vocabulary {
  closed,  // unresolved class names are errors
  open,    // unresolved class names are reported and their segments dropped
};

struct LoadOptions {
  AnnotationMode mode = AnnotationMode::tracking;
  Vocabulary vocabulary = Vocabulary::closed;
};

struct ParsedSequence {
  std::optional<SequenceAnnotation> sequence;  // set only when issues is empty
  std::vector<Issue> issues;
  std::vector<std::string> warnings;
};

// Validates every invariant and collects all violations instead of stopping
// at the first one.
inline ParsedSequence parse_sequence(const json& j, const Taxonomy& taxonomy, const LoadOptions& options = {},
                                     const std::string& source = "<sequence>") {
  ParsedSequence result;
  auto fail = [&](ErrorKind kind, const std::string& msg) { result.issues.push_back({kind, source + ": " + msg}); };

  if (!j.is_object()) {
    fail(ErrorKind::schema, "top level must be an object");
    return result;
  }
  SequenceAnnotation seq;
  if (!j.contains("sequence") || !j.at("sequence").is_string()) {
    fail(ErrorKind::schema, "'sequence' must be a string");
  } else {
    seq.sequence_id = j.at("sequence").get<std::string>();
  }
  for (const char* key : {"height", "width"}) {
    if (!j.contains(key) || !is_non_negative_integer(j.at(key))) {
      fail(ErrorKind::schema, std::string("'") + key + "' must be a non-negative integer");
    }
  }
  if (!j.contains("frames") || !j.at("frames").is_array()) fail(ErrorKind::schema, "'frames' must be an array");
  if (!result.issues.empty()) return result;
  seq.height = j.at("height").get<std::uint32_t>();
  seq.width = j.at("width").get<std::uint32_t>();

  std::set<std::string> unresolved;
  std::optional<std::int64_t> last_id;
  const json& frames = j.at("frames");
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const json& fj = frames[fi];
    std::string where = "frame[" + std::to_string(fi) + "]";
    if (!fj.is_object() || !fj.contains("frame_id") || !fj.at("frame_id").is_number_integer() ||
        fj.at("frame_id").get<std::int64_t>() < 0) {
      fail(ErrorKind::schema, where + ": 'frame_id' must be an integer >= 0");
      continue;
    }
    FrameAnnotation frame{fj.at("frame_id").get<std::int64_t>(), seq.height, seq.width, {}};
    where += " (frame_id " + std::to_string(frame.frame_id) + ")";
    if (last_id && frame.frame_id <= *last_id) {
      fail(frame.frame_id == *last_id ? ErrorKind::duplicate_frame : ErrorKind::invariant_violation,
           where + ": frame_ids must be unique and strictly increasing");
    }
    last_id = frame.frame_id;
    if (!fj.contains("segments") || !fj.at("segments").is_array()) {
      fail(ErrorKind::schema, where + ": 'segments' must be an array");
      continue;
    }
    const json& segs = fj.at("segments");
    for (std::size_t si = 0; si < segs.size(); ++si) {
      const json& sj = segs[si];
      const std::string at = where + " segment[" + std::to_string(si) + "]";
      if (!sj.is_object() || !sj.contains("class") || !sj.at("class").is_string()) {
        fail(ErrorKind::schema, at + ": 'class' must be a string");
        continue;
      }
      Segment seg;
      if (sj.contains("track_id") && !sj.at("track_id").is_null()) {
        if (!sj.at("track_id").is_number_integer()) {
          fail(ErrorKind::schema, at + ": 'track_id' must be an integer or null");
          continue;
        }
        seg.track_id = sj.at("track_id").get<std::int64_t>();
      }
      if (!sj.contains("layer") || !sj.at("layer").is_number_integer()) {
        fail(ErrorKind::schema, at + ": 'layer' must be an integer");
        continue;
      }
      seg.layer = sj.at("layer").get<int>();
      if (!sj.contains("rle")) {
        fail(ErrorKind::schema, at + ": missing 'rle'");
        continue;
      }
      try {
        seg.mask = mask_from_json(sj.at("rle"));
      } catch (const Error& e) {
        fail(e.kind(), at + ": " + e.what());
        continue;
      }
      if (seg.mask.height() != seq.height || seg.mask.width() != seq.width) {
        fail(ErrorKind::dimension_mismatch, at + ": rle size differs from the sequence size");
        continue;
      }
      const std::string raw = sj.at("class").get<std::string>();
      const std::optional<std::string> name = taxonomy.resolve(raw);
      if (!name) {
        if (options.vocabulary == Vocabulary::closed) {
          fail(ErrorKind::unknown_class, at + ": class '" + raw + "' is not in the taxonomy");
        } else {
          unresolved.insert(raw);
        }
        continue;
      }
      seg.class_name = *name;
      const ClassInfo& info = *taxonomy.find(seg.class_name);
      if (info.is_thing() && !seg.track_id && options.mode == AnnotationMode::tracking) {
        fail(ErrorKind::missing_track_id, at + ": thing segment of class '" + info.name + "' has no track_id");
      }
      frame.segments.push_back(std::move(seg));
    }

    // Per-frame invariants: thing masks of one class are pairwise disjoint and
    // (class, track_id) is unique.
    std::set<std::pair<std::string, std::int64_t>> ids;
    for (std::size_t a = 0; a < frame.segments.size(); ++a) {
      const Segment& sa = frame.segments[a];
      const ClassInfo& ca = *taxonomy.find(sa.class_name);
      if (!ca.is_thing()) continue;
      if (sa.track_id && !ids.emplace(sa.class_name, *sa.track_id).second) {
        fail(ErrorKind::duplicate_track, where + ": track_id " + std::to_string(*sa.track_id) + " of class '" +
                                             sa.class_name + "' appears more than once");
      }
      for (std::size_t b = a + 1; b < frame.segments.size(); ++b) {
        const Segment& sb = frame.segments[b];
        if (sb.class_name == sa.class_name && overlaps(sa.mask, sb.mask)) {
          fail(ErrorKind::invariant_violation, where + ": thing-disjointness violated by two '" + sa.class_name +
                                                   "' segments overlapping");
        }
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  for (const std::string& raw : unresolved) {
    result.warnings.push_back(source + ": unresolved class '" + raw + "' dropped (open vocabulary)");
  }
  if (result.issues.empty()) result.sequence = std::move(seq);
  return result;
}

inline SequenceAnnotation load_sequence(const std::filesystem::path& path, const Taxonomy& taxonomy,
                                        const LoadOptions& options = {}, std::vector<std::string>* warnings = nullptr) {
  ParsedSequence parsed;
  try {
    parsed = parse_sequence(read_json_file(path), taxonomy, options, path.string());
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError({{e.kind(), e.what()}});
  }
  if (!parsed.issues.empty()) throw ValidationError(std::move(parsed.issues));
  if (warnings) warnings->insert(warnings->end(), parsed.warnings.begin(), parsed.warnings.end());
  return std::move(*parsed.sequence);
}

inline json sequence_to_json(const SequenceAnnotation& seq) {
  json frames = json::array();
  for (const FrameAnnotation& f : seq.frames) {
    json segs = json::array();
    for (const Segment& s : f.segments) {
      segs.push_back({{"class", s.class_name},
                      {"track_id", s.track_id ? json(*s.track_id) : json(nullptr)},
                      {"layer", s.layer},
                      {"rle", mask_to_json(s.mask)}});
    }
    frames.push_back({{"frame_id", f.frame_id}, {"segments", std::move(segs)}});
  }
  return json{{"sequence", seq.sequence_id}, {"height", seq.height}, {"width", seq.width}, {"frames", frames}};
}

inline void save_sequence(const std::filesystem::path& path, const SequenceAnnotation& seq) {
  write_text_file(path, sequence_to_json(seq).dump() + "\n");
}

// ---------------------------------------------------------------------------
// Manifests

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
};

struct Manifest {
  std::string dataset;
  std::vector<ManifestEntry> sequences;
};

inline Manifest parse_manifest(const json& j, const std::filesystem::path& base_dir = {}) {
  std::vector<Issue> issues;
  if (!j.is_object() || !j.contains("dataset") || !j.at("dataset").is_string() || !j.contains("sequences") ||
      !j.at("sequences").is_array()) {
    throw ValidationError({{ErrorKind::schema, "manifest needs a string 'dataset' and a 'sequences' array"}});
  }
  Manifest m;
  m.dataset = j.at("dataset").get<std::string>();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j.at("sequences").size(); ++i) {
    const json& e = j.at("sequences")[i];
    if (!e.is_object() || !e.contains("id") || !e.at("id").is_string() || !e.contains("path") ||
        !e.at("path").is_string()) {
      issues.push_back({ErrorKind::schema, "sequences[" + std::to_string(i) + "] needs string 'id' and 'path'"});
      continue;
    }
    ManifestEntry entry{e.at("id").get<std::string>(), e.at("path").get<std::string>()};
    if (!ids.insert(entry.id).second) {
      issues.push_back({ErrorKind::invariant_violation, "duplicate sequence id '" + entry.id + "'"});
    }
    if (entry.path.is_relative()) entry.path = base_dir / entry.path;
    m.sequences.push_back(std::move(entry));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  Manifest m = parse_manifest(read_json_file(path), path.parent_path());
  std::vector<Issue> issues;
  for (const ManifestEntry& e : m.sequences) {
    if (!std::filesystem::exists(e.path)) {
      issues.push_back({ErrorKind::io, path.string() + ": sequence '" + e.id + "' path " + e.path.string() +
                                           " does not exist"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return m;
}

// Paths are written relative to the manifest directory when possible.
inline void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  json seqs = json::array();
  for (const ManifestEntry& e : m.sequences) {
    std::filesystem::path p = e.path;
    if (path.has_parent_path() && p.is_absolute()) p = std::filesystem::relative(p, path.parent_path());
    seqs.push_back({{"id", e.id}, {"path", p.generic_string()}});
  }
  write_text_file(path, json{{"dataset", m.dataset}, {"sequences", seqs}}.dump(2) + "\n");
}

}  // namespace ospa_eval
