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

// Comparison metrics reported next to OSPA: panoptic quality, segmentation
// and tracking quality (STQ), identity F1 and fragmentation. All of them need
// single-label input; run flatten_multilabel on multi-label ground truth
// first.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/assignment.hpp"
#include "ospa_eval/mask.hpp"
#include "ospa_eval/numeric.hpp"

namespace ospa_eval {

// Throws multi-label-input if two segments of different classes overlap.
inline void require_single_label(const FrameAnnotation& frame, std::string_view what) {
  const auto& segs = frame.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (segs[i].class_name == segs[j].class_name) continue;
      if (overlaps(segs[i].mask, segs[j].mask)) {
        throw Error(ErrorKind::multi_label_input,
                    std::string(what) + " frame_id " + std::to_string(frame.frame_id) + ": classes '" +
                        segs[i].class_name + "' and '" + segs[j].class_name +
                        "' overlap; flatten multi-label annotations first");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Panoptic quality

struct PqClassStats {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double iou_sum = 0.0;

  double denominator() const { return static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn); }
  double pq() const { return denominator() > 0 ? iou_sum / denominator() : 0.0; }
  double sq() const { return tp > 0 ? iou_sum / static_cast<double>(tp) : 0.0; }
  double rq() const { return denominator() > 0 ? static_cast<double>(tp) / denominator() : 0.0; }
};

struct PqSummary {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  std::size_t classes = 0;
};

struct PqResult {
  std::map<std::string, PqClassStats> per_class;
  PqSummary all;
  PqSummary thing;
  PqSummary stuff;
};

namespace detail {

struct LabeledRegion {
  std::string class_name;
  Mask mask;
};

// Thing segments stay separate; stuff segments of one class merge into one
// region.
inline std::vector<LabeledRegion> panoptic_regions(const FrameAnnotation& frame, const Taxonomy& taxonomy,
                                                   ClassSubset subset) {
  std::vector<LabeledRegion> out;
  std::map<std::string, std::size_t> stuff_index;
  for (const Segment& s : frame.segments) {
    const ClassInfo& c = taxonomy.at(s.class_name);
    if (!c.in(subset) || s.mask.area() == 0) continue;
    if (c.is_stuff()) {
      auto [it, inserted] = stuff_index.emplace(c.name, out.size());
      if (!inserted) {
        out[it->second].mask = mask_union(out[it->second].mask, s.mask);
        continue;
      }
    }
    out.push_back({c.name, s.mask});
  }
  return out;
}

inline PqSummary summarize_pq(const std::map<std::string, PqClassStats>& per_class, const Taxonomy& taxonomy,
                              ClassSubset subset) {
  CompensatedSum pq, sq, rq;
  PqSummary out;
  for (const auto& [name, st] : per_class) {
    if (!taxonomy.at(name).in(subset)) continue;
    pq.add(st.pq());
    sq.add(st.sq());
    rq.add(st.rq());
    ++out.classes;
  }
  if (out.classes > 0) {
    const double n = static_cast<double>(out.classes);
    out.pq = pq.value() / n;
    out.sq = sq.value() / n;
    out.rq = rq.value() / n;
  }
  return out;
}

}  // namespace detail

// Accumulates PQ statistics frame by frame; matches are gt/pred regions of the
// same class with IoU > 0.5, which are unique when regions of one side are
// disjoint.
class PqAccumulator {
 public:
  PqAccumulator(const Taxonomy& taxonomy, ClassSubset subset = ClassSubset::all)
      : taxonomy_(&taxonomy), subset_(subset) {}

  void add(const FrameAnnotation& gt, const FrameAnnotation& pred) {
    require_single_label(gt, "ground truth");
    const auto xs = detail::panoptic_regions(gt, *taxonomy_, subset_);
    const auto ys = detail::panoptic_regions(pred, *taxonomy_, subset_);
    std::vector<char> gt_matched(xs.size(), 0), pred_matched(ys.size(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        if (xs[i].class_name != ys[j].class_name) continue;
        const double v = iou(xs[i].mask, ys[j].mask);
        if (v <= 0.5) continue;
        if (gt_matched[i] || pred_matched[j]) {
          throw Error(ErrorKind::invariant_violation, "frame_id " + std::to_string(gt.frame_id) +
                                                          ": more than one IoU > 0.5 match for a segment");
        }
        gt_matched[i] = pred_matched[j] = 1;
        PqClassStats& st = stats_[xs[i].class_name];
        ++st.tp;
        st.iou_sum += v;
      }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!gt_matched[i]) ++stats_[xs[i].class_name].fn;
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!pred_matched[j]) ++stats_[ys[j].class_name].fp;
    }
  }

  PqResult result() const {
    PqResult out;
    out.per_class = stats_;
    out.all = detail::summarize_pq(stats_, *taxonomy_, ClassSubset::all);
    out.thing = detail::summarize_pq(stats_, *taxonomy_, ClassSubset::thing);
    out.stuff = detail::summarize_pq(stats_, *taxonomy_, ClassSubset::stuff);
    return out;
  }

 private:
  const Taxonomy* taxonomy_;
  ClassSubset subset_;
  std::map<std::string, PqClassStats> stats_;
};

inline PqResult pq(const std::vector<FramePair>& pairs, const Taxonomy& taxonomy,
                   ClassSubset subset = ClassSubset::all) {
  PqAccumulator acc(taxonomy, subset);
  for (const FramePair& p : pairs) acc.add(p.gt, p.pred);
  return acc.result();
}

// ---------------------------------------------------------------------------
// Segmentation and tracking quality

struct StqResult {
  double stq = 0.0;
  double aq = 0.0;
  double sq = 0.0;  // class-level IoU averaged over classes (the semantic term)
  std::size_t gt_tracks = 0;
};

// STQ = sqrt(AQ * SQ).
//   AQ = 1/|G| sum_g 1/|g| sum_{p : |p & g| > 0} |p & g| * IoU_id(p, g)
//   IoU_id(p, g) = |p & g| / (|p| + |g| - |p & g|)
// where |.| counts pixels over the whole sequence and tracks are thing
// (class, track_id) tubes on both sides. SQ is the class IoU with
// intersections and unions accumulated over all frames.
class StqAccumulator {
 public:
  explicit StqAccumulator(const Taxonomy& taxonomy) : taxonomy_(&taxonomy) {}

  void add_sequence(const SequenceAnnotation& gt, const SequenceAnnotation& pred) {
    const AlignedFrames aligned = align_frames(gt.frames, pred.frames, gt.sequence_id);
    using Key = std::pair<std::string, std::int64_t>;
    std::map<Key, std::uint64_t> gt_size, pred_size;
    std::map<std::pair<Key, Key>, std::uint64_t> overlap;

    for (const FramePair& fp : aligned.pairs) {
      require_single_label(fp.gt, "ground truth");
      std::vector<std::pair<Key, const Mask*>> gts, preds;
      collect_things(fp.gt, gts, gt_size);
      collect_things(fp.pred, preds, pred_size);
      for (const auto& [gk, gm] : gts) {
        for (const auto& [pk, pm] : preds) {
          const std::uint64_t inter = intersection_area(*gm, *pm);
          if (inter > 0) overlap[{gk, pk}] += inter;
        }
      }
      accumulate_semantic(fp.gt, fp.pred);
    }

    std::map<Key, CompensatedSum> per_gt;
    for (const auto& [key, tpa] : overlap) {
      const auto& [gk, pk] = key;
      const double inter = static_cast<double>(tpa);
      const double iou_id = inter / (static_cast<double>(gt_size.at(gk)) + static_cast<double>(pred_size.at(pk)) - inter);
      per_gt[gk].add(inter * iou_id);
    }
    for (const auto& [gk, size] : gt_size) {
      auto it = per_gt.find(gk);
      const double score = it == per_gt.end() ? 0.0 : it->second.value() / static_cast<double>(size);
      aq_sum_.add(score);
      ++gt_tracks_;
    }
    pred_tracks_ += pred_size.size();
  }

  StqResult result() const {
    StqResult out;
    out.gt_tracks = gt_tracks_;
    if (gt_tracks_ > 0) {
      out.aq = aq_sum_.value() / static_cast<double>(gt_tracks_);
    } else {
      out.aq = pred_tracks_ == 0 ? 1.0 : 0.0;
    }
    CompensatedSum iou_sum;
    std::size_t classes = 0;
    for (const auto& [name, iu] : semantic_) {
      if (iu.second == 0) continue;
      iou_sum.add(static_cast<double>(iu.first) / static_cast<double>(iu.second));
      ++classes;
    }
    out.sq = classes == 0 ? 1.0 : iou_sum.value() / static_cast<double>(classes);
    out.stq = std::sqrt(out.aq * out.sq);
    return out;
  }

 private:
  template <class Key>
  void collect_things(const FrameAnnotation& frame, std::vector<std::pair<Key, const Mask*>>& out,
                      std::map<Key, std::uint64_t>& sizes) const {
    for (const Segment& s : frame.segments) {
      const ClassInfo& c = taxonomy_->at(s.class_name);
      if (!c.is_thing() || !s.track_id) continue;
      Key key{c.name, *s.track_id};
      out.emplace_back(key, &s.mask);
      sizes[key] += s.mask.area();
    }
  }

  void accumulate_semantic(const FrameAnnotation& gt, const FrameAnnotation& pred) {
    std::map<std::string, Mask> g, p;
    auto add = [this](std::map<std::string, Mask>& into, const FrameAnnotation& f) {
      for (const Segment& s : f.segments) {
        const ClassInfo& c = taxonomy_->at(s.class_name);
        auto [it, inserted] = into.try_emplace(c.name, s.mask);
        if (!inserted) it->second = mask_union(it->second, s.mask);
      }
    };
    add(g, gt);
    add(p, pred);
    std::set<std::string> names;
    for (const auto& kv : g) names.insert(kv.first);
    for (const auto& kv : p) names.insert(kv.first);
    for (const std::string& name : names) {
      auto gi = g.find(name);
      auto pi = p.find(name);
      auto& [inter, uni] = semantic_[name];
      if (gi != g.end() && pi != p.end()) {
        const std::uint64_t i = intersection_area(gi->second, pi->second);
        inter += i;
        uni += gi->second.area() + pi->second.area() - i;
      } else {
        uni += gi != g.end() ? gi->second.area() : pi->second.area();
      }
    }
  }

  const Taxonomy* taxonomy_;
  CompensatedSum aq_sum_;
  std::size_t gt_tracks_ = 0;
  std::size_t pred_tracks_ = 0;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> semantic_;
};

inline StqResult stq(const SequenceAnnotation& gt, const SequenceAnnotation& pred, const Taxonomy& taxonomy) {
  StqAccumulator acc(taxonomy);
  acc.add_sequence(gt, pred);
  return acc.result();
}

// ---------------------------------------------------------------------------
// Identity F1 and fragmentation

struct IdentityResult {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  std::size_t idtp = 0;
  std::size_t gt_detections = 0;
  std::size_t pred_detections = 0;
  std::size_t frag = 0;
};

// Per-frame correspondence is same-class IoU > 0.5. IDTP comes from the
// one-to-one gt/pred track assignment that maximizes co-matched frames;
//   IDF1 = 2 IDTP / (gt detections + pred detections).
// Frag counts, per gt track, every return to matched status after a frame in
// which the track existed but was unmatched.
class IdentityAccumulator {
 public:
  explicit IdentityAccumulator(const Taxonomy& taxonomy) : taxonomy_(&taxonomy) {}

  void add_sequence(const SequenceAnnotation& gt, const SequenceAnnotation& pred) {
    const AlignedFrames aligned = align_frames(gt.frames, pred.frames, gt.sequence_id);
    using Key = std::pair<std::string, std::int64_t>;
    std::map<Key, std::size_t> gt_index, pred_index;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> co_matched;
    std::vector<std::vector<char>> matched_history;  // per gt track, in frame order

    for (const FramePair& fp : aligned.pairs) {
      require_single_label(fp.gt, "ground truth");
      auto things = [this](const FrameAnnotation& f) {
        std::vector<std::pair<Key, const Mask*>> out;
        for (const Segment& s : f.segments) {
          const ClassInfo& c = taxonomy_->at(s.class_name);
          if (c.is_thing() && s.track_id) out.emplace_back(Key{c.name, *s.track_id}, &s.mask);
        }
        return out;
      };
      const auto gts = things(fp.gt);
      const auto preds = things(fp.pred);
      gt_detections_ += gts.size();
      pred_detections_ += preds.size();
      for (const auto& [pk, pm] : preds) pred_index.try_emplace(pk, pred_index.size());
      for (const auto& [gk, gm] : gts) {
        const auto [git, fresh] = gt_index.try_emplace(gk, gt_index.size());
        if (fresh) matched_history.emplace_back();
        bool matched = false;
        for (const auto& [pk, pm] : preds) {
          if (pk.first != gk.first || iou(*gm, *pm) <= 0.5) continue;
          matched = true;
          ++co_matched[{git->second, pred_index.at(pk)}];
          break;
        }
        matched_history[git->second].push_back(matched ? 1 : 0);
      }
    }

    for (const auto& history : matched_history) {
      bool seen = false;
      bool previous = false;
      for (char m : history) {
        if (m && !previous && seen) ++frag_;
        seen |= m != 0;
        previous = m != 0;
      }
    }

    if (gt_index.empty() || pred_index.empty() || co_matched.empty()) return;
    std::size_t best = 0;
    for (const auto& kv : co_matched) best = std::max(best, kv.second);
    CostMatrix cost(gt_index.size(), pred_index.size());
    for (std::size_t i = 0; i < cost.rows(); ++i)
      for (std::size_t j = 0; j < cost.cols(); ++j) cost.set(i, j, static_cast<double>(best));
    for (const auto& [key, count] : co_matched) {
      cost.set(key.first, key.second, static_cast<double>(best - count));
    }
    for (const auto& [i, j] : solve_assignment(cost).pairs) {
      auto it = co_matched.find({i, j});
      if (it != co_matched.end()) idtp_ += it->second;
    }
  }

  IdentityResult result() const {
    IdentityResult out;
    out.idtp = idtp_;
    out.gt_detections = gt_detections_;
    out.pred_detections = pred_detections_;
    out.frag = frag_;
    const double tp = static_cast<double>(idtp_);
    const std::size_t total = gt_detections_ + pred_detections_;
    out.idf1 = total == 0 ? 1.0 : 2.0 * tp / static_cast<double>(total);
    out.idp = pred_detections_ == 0 ? (gt_detections_ == 0 ? 1.0 : 0.0) : tp / static_cast<double>(pred_detections_);
    out.idr = gt_detections_ == 0 ? (pred_detections_ == 0 ? 1.0 : 0.0) : tp / static_cast<double>(gt_detections_);
    return out;
  }

 private:
  const Taxonomy* taxonomy_;
  std::size_t idtp_ = 0;
  std::size_t gt_detections_ = 0;
  std::size_t pred_detections_ = 0;
  std::size_t frag_ = 0;
};

inline IdentityResult idf1_frag(const SequenceAnnotation& gt, const SequenceAnnotation& pred,
                                const Taxonomy& taxonomy) {
  IdentityAccumulator acc(taxonomy);
  acc.add_sequence(gt, pred);
  return acc.result();
}

}  // namespace ospa_eval
