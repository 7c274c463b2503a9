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

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/mask.hpp"

namespace ospa_eval {

// Resolves multi-label pixels to a single segment. A pixel covered by several
// segments goes to the one that ranks first under
//   (1) thing before stuff, (2) lower layer, (3) smaller area, (4) lower index.
// Segments left without pixels are removed; the rest keep their original order.
inline FrameAnnotation flatten_multilabel(const FrameAnnotation& frame, const Taxonomy& taxonomy) {
  const auto& segs = frame.segments;
  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rank = [&](std::size_t i) {
    const bool stuff = taxonomy.at(segs[i].class_name).is_stuff();
    return std::make_tuple(stuff, segs[i].layer, segs[i].mask.area(), i);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });

  std::vector<Mask> resolved(segs.size());
  Mask covered = Mask::empty(frame.height, frame.width);
  for (std::size_t i : order) {
    resolved[i] = mask_difference(segs[i].mask, covered);
    covered = mask_union(covered, segs[i].mask);
  }

  FrameAnnotation out{frame.frame_id, frame.height, frame.width, {}};
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (resolved[i].area() == 0) continue;
    Segment s = segs[i];
    s.mask = std::move(resolved[i]);
    out.segments.push_back(std::move(s));
  }
  return out;
}

inline SequenceAnnotation flatten_multilabel(const SequenceAnnotation& seq, const Taxonomy& taxonomy) {
  SequenceAnnotation out{seq.sequence_id, seq.height, seq.width, {}};
  out.frames.reserve(seq.frames.size());
  for (const FrameAnnotation& f : seq.frames) out.frames.push_back(flatten_multilabel(f, taxonomy));
  return out;
}

}  // namespace ospa_eval
