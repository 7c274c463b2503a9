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

// Whole-dataset evaluation producing the JSON report written by the CLI.
//
// Report layout (schema_version 1):
//   {"schema_version": 1, "toolkit": "ospa_eval", "version": str,
//    "task": "panoptic_segmentation" | "panoptic_tracking",
//    "dataset": {"gt": str, "pred": str, "sequences": [str], "frames": int},
//    "config": {...everything needed to reproduce the numbers...},
//    "metrics": {<name>: {<field>: number, "per_class": {<class>: {...}}}},
//    "warnings": [str]}
//
// The worker count is deliberately absent from "config": it never changes a
// number, and reports must be byte-identical across worker counts.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/baseline_metrics.hpp"
#include "ospa_eval/flatten.hpp"
#include "ospa_eval/io.hpp"
#include "ospa_eval/numeric.hpp"
#include "ospa_eval/ospa.hpp"
#include "ospa_eval/ospa_track.hpp"
#include "ospa_eval/version.hpp"

namespace ospa_eval {

struct Dataset {
  std::string name;
  std::vector<SequenceAnnotation> sequences;
  std::vector<std::string> warnings;
};

// Loads every sequence of a manifest. All files are validated even after a
// failure, and the combined issue list is thrown.
inline Dataset load_dataset(const std::filesystem::path& manifest_path, const Taxonomy& taxonomy,
                            const LoadOptions& options = {}, std::size_t workers = 1) {
  const Manifest manifest = load_manifest(manifest_path);
  const std::size_t n = manifest.sequences.size();
  std::vector<std::optional<SequenceAnnotation>> loaded(n);
  std::vector<std::vector<Issue>> issues(n);
  std::vector<std::vector<std::string>> warnings(n);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      loaded[i] = load_sequence(manifest.sequences[i].path, taxonomy, options, &warnings[i]);
    } catch (const ValidationError& e) {
      issues[i] = e.issues();
    } catch (const Error& e) {
      issues[i] = {{e.kind(), e.what()}};
    }
  });
  std::vector<Issue> all;
  for (const auto& v : issues) all.insert(all.end(), v.begin(), v.end());
  if (!all.empty()) throw ValidationError(std::move(all));
  Dataset out{manifest.dataset, {}, {}};
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (loaded[i]->sequence_id != manifest.sequences[i].id) {
      out.warnings.push_back(manifest_path.string() + ": sequence '" + manifest.sequences[i].id +
                             "' file declares id '" + loaded[i]->sequence_id + "'; using the manifest id");
      loaded[i]->sequence_id = manifest.sequences[i].id;
    }
    out.sequences.push_back(std::move(*loaded[i]));
    out.warnings.insert(out.warnings.end(), warnings[i].begin(), warnings[i].end());
  }
  return out;
}

struct EvalConfig {
  ClassSubset subset = ClassSubset::all;
  bool scale_breakdown = false;
  // Unset: OSPA on the annotations as given, baseline metrics on flattened
  // ones. Set: the same choice for both families.
  std::optional<bool> flatten;
  std::size_t workers = 1;
  Vocabulary vocabulary = Vocabulary::closed;
  TemporalWindow window = TemporalWindow::union_of_domains;

  bool flatten_ospa() const { return flatten.value_or(false); }
  bool flatten_baseline() const { return flatten.value_or(true); }
};

namespace detail {

inline json components_json(const OspaComponents& c) {
  return json{{"total", c.total}, {"loc", c.loc}, {"card", c.card}};
}

inline json segmentation_block(const SegmentationOspa& s) {
  json block = components_json(s.overall);
  json per_class = json::object();
  for (const auto& [name, agg] : s.per_class) {
    json entry = components_json(agg.value);
    entry["frames"] = agg.frames;
    per_class[name] = std::move(entry);
  }
  block["per_class"] = std::move(per_class);
  return block;
}

struct SequencePair {
  const SequenceAnnotation* gt;
  SequenceAnnotation pred;
};

inline std::vector<SequencePair> align_sequences(const Dataset& gt, const Dataset& pred,
                                                 std::vector<std::string>& warnings) {
  std::map<std::string, const SequenceAnnotation*> by_id;
  for (const SequenceAnnotation& s : pred.sequences) by_id.emplace(s.sequence_id, &s);
  std::vector<SequencePair> out;
  std::set<std::string> used;
  for (const SequenceAnnotation& g : gt.sequences) {
    auto it = by_id.find(g.sequence_id);
    if (it == by_id.end()) {
      warnings.push_back("sequence '" + g.sequence_id + "' has no prediction; evaluated as empty");
      out.push_back({&g, SequenceAnnotation{g.sequence_id, g.height, g.width, {}}});
      continue;
    }
    used.insert(g.sequence_id);
    out.push_back({&g, *it->second});
  }
  for (const auto& [id, s] : by_id) {
    if (!used.contains(id)) warnings.push_back("prediction sequence '" + id + "' has no ground truth and was ignored");
  }
  return out;
}

inline json report_header(std::string_view task, const Dataset& gt, const Dataset& pred, std::size_t frames) {
  json seqs = json::array();
  for (const SequenceAnnotation& s : gt.sequences) seqs.push_back(s.sequence_id);
  return json{{"schema_version", 1},
              {"toolkit", "ospa_eval"},
              {"version", kVersion},
              {"task", task},
              {"dataset", {{"gt", gt.name}, {"pred", pred.name}, {"sequences", seqs}, {"frames", frames}}}};
}

inline json config_json(const EvalConfig& c, bool tracking) {
  json j{{"subset", to_string(c.subset)},
         {"flatten_ospa", c.flatten_ospa()},
         {"flatten_baseline", c.flatten_baseline()},
         {"world", c.vocabulary == Vocabulary::closed ? "closed" : "open"},
         {"class_set", "present_in_gt_or_pred"},
         {"ospa_order", 1},
         {"ospa_cutoff", 1}};
  if (tracking) {
    j["window"] = to_string(c.window);
    j["aggregation"] = "mean_of_sequence_class_means";
  } else {
    j["scale_breakdown"] = c.scale_breakdown;
    j["aggregation"] = "mean_of_frame_class_means";
    j["scale_buckets"] = {{"small_max_area", kSmallMaxArea}, {"medium_max_area", kMediumMaxArea}};
  }
  return j;
}

inline json pq_json(const PqResult& r) {
  json per_class = json::object();
  for (const auto& [name, st] : r.per_class) {
    per_class[name] = {{"pq", st.pq()}, {"sq", st.sq()}, {"rq", st.rq()}, {"tp", st.tp}, {"fp", st.fp}, {"fn", st.fn}};
  }
  return json{{"pq", r.all.pq}, {"sq", r.all.sq}, {"rq", r.all.rq}, {"classes", r.all.classes}, {"per_class", per_class}};
}

inline json pq_summary_json(const PqSummary& s) {
  return json{{"pq", s.pq}, {"sq", s.sq}, {"rq", s.rq}, {"classes", s.classes}};
}

}  // namespace detail

inline json evaluate_ps(const Dataset& gt, const Dataset& pred, const Taxonomy& taxonomy, const EvalConfig& config) {
  std::vector<std::string> warnings = gt.warnings;
  warnings.insert(warnings.end(), pred.warnings.begin(), pred.warnings.end());
  const auto sequences = detail::align_sequences(gt, pred, warnings);

  std::vector<FramePair> raw;
  for (const auto& sp : sequences) {
    AlignedFrames a = align_frames(sp.gt->frames, sp.pred.frames, sp.gt->sequence_id);
    for (FramePair& p : a.pairs) raw.push_back(std::move(p));
    warnings.insert(warnings.end(), a.warnings.begin(), a.warnings.end());
  }
  std::vector<FramePair> flat;
  if (config.flatten_ospa() || config.flatten_baseline()) {
    flat.resize(raw.size());
    parallel_for(raw.size(), config.workers, [&](std::size_t i) {
      flat[i] = {flatten_multilabel(raw[i].gt, taxonomy), flatten_multilabel(raw[i].pred, taxonomy)};
    });
  }
  const std::vector<FramePair>& ospa_input = config.flatten_ospa() ? flat : raw;
  const std::vector<FramePair>& baseline_input = config.flatten_baseline() ? flat : raw;

  const EvalOptions opts{config.workers};
  const SegmentationOspa seg = ospa_ps_dataset(ospa_input, taxonomy, config.subset, opts);
  json metrics;
  metrics["O_PS"] = detail::segmentation_block(seg);
  metrics["O_PS_thing"] = detail::components_json(seg.thing);
  metrics["O_PS_stuff"] = detail::components_json(seg.stuff);
  if (config.scale_breakdown) {
    const ScaleBreakdown scales = ospa_ps_by_scale(ospa_input, taxonomy, config.subset, opts);
    metrics["O_PS_small"] = detail::segmentation_block(scales.small);
    metrics["O_PS_medium"] = detail::segmentation_block(scales.medium);
    metrics["O_PS_large"] = detail::segmentation_block(scales.large);
  }
  const PqResult pqr = pq(baseline_input, taxonomy, config.subset);
  metrics["PQ"] = detail::pq_json(pqr);
  metrics["PQ_thing"] = detail::pq_summary_json(pqr.thing);
  metrics["PQ_stuff"] = detail::pq_summary_json(pqr.stuff);

  json report = detail::report_header("panoptic_segmentation", gt, pred, raw.size());
  report["config"] = detail::config_json(config, false);
  report["metrics"] = std::move(metrics);
  report["warnings"] = warnings;
  return report;
}

inline json evaluate_pt(const Dataset& gt, const Dataset& pred, const Taxonomy& taxonomy, const EvalConfig& config) {
  std::vector<std::string> warnings = gt.warnings;
  warnings.insert(warnings.end(), pred.warnings.begin(), pred.warnings.end());
  const auto sequences = detail::align_sequences(gt, pred, warnings);

  struct Fragment {
    CompensatedSum total, loc, card;
    std::map<std::string, std::pair<std::array<CompensatedSum, 3>, std::size_t>> per_class;
  };
  const char* names[5] = {"O2_PT", "O2_PT_thing", "O2_PT_stuff", "O2_PT_known", "O2_PT_unknown"};
  Fragment fragments[5];
  StqAccumulator stq_acc(taxonomy);
  IdentityAccumulator id_acc(taxonomy);
  std::size_t frames = 0;

  for (const auto& sp : sequences) {
    frames += sp.gt->frames.size();
    for (const FrameAnnotation& f : sp.pred.frames) {
      if (std::none_of(sp.gt->frames.begin(), sp.gt->frames.end(),
                       [&](const FrameAnnotation& g) { return g.frame_id == f.frame_id; })) {
        warnings.push_back(sp.gt->sequence_id + ": prediction frame_id " + std::to_string(f.frame_id) +
                           " has no ground-truth frame and was ignored");
      }
    }
    std::optional<SequenceAnnotation> gt_flat, pred_flat;
    if (config.flatten_ospa() || config.flatten_baseline()) {
      gt_flat = flatten_multilabel(*sp.gt, taxonomy);
      pred_flat = flatten_multilabel(sp.pred, taxonomy);
    }
    const SequenceAnnotation& og = config.flatten_ospa() ? *gt_flat : *sp.gt;
    const SequenceAnnotation& op = config.flatten_ospa() ? *pred_flat : sp.pred;
    const TrackingBreakdown b =
        ospa2_breakdowns(og, op, taxonomy, config.subset, TrackingOptions{config.window, config.workers});
    const TrackingOspa* parts[5] = {&b.all, &b.thing, &b.stuff, &b.known, &b.unknown};
    for (int k = 0; k < 5; ++k) {
      fragments[k].total.add(parts[k]->mean.total);
      fragments[k].loc.add(parts[k]->mean.loc);
      fragments[k].card.add(parts[k]->mean.card);
      for (const auto& [name, c] : parts[k]->per_class) {
        auto& [sums, count] = fragments[k].per_class[name];
        sums[0].add(c.total);
        sums[1].add(c.loc);
        sums[2].add(c.card);
        ++count;
      }
    }
    const SequenceAnnotation& bg = config.flatten_baseline() ? *gt_flat : *sp.gt;
    const SequenceAnnotation& bp = config.flatten_baseline() ? *pred_flat : sp.pred;
    const SequenceAnnotation bg_sub = filter_subset(bg, taxonomy, config.subset);
    const SequenceAnnotation bp_sub = filter_subset(bp, taxonomy, config.subset);
    stq_acc.add_sequence(bg_sub, bp_sub);
    id_acc.add_sequence(bg_sub, bp_sub);
  }

  json metrics;
  const double n = static_cast<double>(sequences.size());
  for (int k = 0; k < 5; ++k) {
    const Fragment& f = fragments[k];
    json block = sequences.empty() ? detail::components_json({})
                                   : detail::components_json({f.total.value() / n, f.loc.value() / n, f.card.value() / n});
    json per_class = json::object();
    for (const auto& [name, entry] : f.per_class) {
      const auto& [sums, count] = entry;
      const double c = static_cast<double>(count);
      json e = detail::components_json({sums[0].value() / c, sums[1].value() / c, sums[2].value() / c});
      e["sequences"] = count;
      per_class[name] = std::move(e);
    }
    block["per_class"] = std::move(per_class);
    metrics[names[k]] = std::move(block);
  }
  const StqResult s = stq_acc.result();
  metrics["STQ"] = {{"stq", s.stq}, {"aq", s.aq}, {"sq", s.sq}, {"gt_tracks", s.gt_tracks}};
  const IdentityResult id = id_acc.result();
  metrics["IDF1"] = {{"idf1", id.idf1},
                     {"idp", id.idp},
                     {"idr", id.idr},
                     {"idtp", id.idtp},
                     {"gt_detections", id.gt_detections},
                     {"pred_detections", id.pred_detections}};
  metrics["Frag"] = {{"count", id.frag}};

  json report = detail::report_header("panoptic_tracking", gt, pred, frames);
  report["config"] = detail::config_json(config, true);
  report["metrics"] = std::move(metrics);
  report["warnings"] = warnings;
  return report;
}

inline LoadOptions load_options(const EvalConfig& config, AnnotationMode mode) { return {mode, config.vocabulary}; }

// Path-based entry points; these are what the command line and the Python
// bindings call.
inline json evaluate_ps_files(const std::filesystem::path& gt_manifest, const std::filesystem::path& pred_manifest,
                              const std::filesystem::path& taxonomy_path, const EvalConfig& config) {
  const Taxonomy taxonomy = load_taxonomy(taxonomy_path);
  const Dataset gt = load_dataset(gt_manifest, taxonomy, {AnnotationMode::segmentation, Vocabulary::closed}, config.workers);
  const Dataset pred = load_dataset(pred_manifest, taxonomy, load_options(config, AnnotationMode::segmentation), config.workers);
  return evaluate_ps(gt, pred, taxonomy, config);
}

inline json evaluate_pt_files(const std::filesystem::path& gt_manifest, const std::filesystem::path& pred_manifest,
                              const std::filesystem::path& taxonomy_path, const EvalConfig& config) {
  const Taxonomy taxonomy = load_taxonomy(taxonomy_path);
  const Dataset gt = load_dataset(gt_manifest, taxonomy, {AnnotationMode::tracking, Vocabulary::closed}, config.workers);
  const Dataset pred = load_dataset(pred_manifest, taxonomy, load_options(config, AnnotationMode::tracking), config.workers);
  return evaluate_pt(gt, pred, taxonomy, config);
}

// CSV rendering: one row per number, "metric,class,field,value". Aggregate
// rows leave the class column empty. Values use the same formatting as the
// JSON report.
inline std::string report_to_csv(const json& report) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "metric,class,field,value\n";
  for (const auto& [metric, block] : report.at("metrics").items()) {
    for (const auto& [field, value] : block.items()) {
      if (field == "per_class") {
        for (const auto& [cls, entry] : value.items()) {
          for (const auto& [f, v] : entry.items()) {
            out << quote(metric) << ',' << quote(cls) << ',' << quote(f) << ',' << v.dump() << '\n';
          }
        }
      } else if (value.is_number()) {
        out << quote(metric) << ",," << quote(field) << ',' << value.dump() << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace ospa_eval
