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

// Run-length encoded binary masks.
//
// Pixels are scanned column-major (index = col * height + row). The counts
// alternate background/foreground runs and always start with a background
// run, which is 0 when the first pixel is foreground. Only that leading run
// may be zero, so every bitmap has exactly one encoding and two masks are
// pixel-equal iff their counts are equal.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ospa_eval/error.hpp"

namespace ospa_eval {

// Dense row-major boolean grid.
struct Bitmap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> bits;

  Bitmap() = default;
  Bitmap(std::uint32_t h, std::uint32_t w)
      : height(h), width(w), bits(std::size_t{h} * w, 0) {}
  Bitmap(std::uint32_t h, std::uint32_t w, std::vector<std::uint8_t> values)
      : height(h), width(w), bits(std::move(values)) {
    if (bits.size() != std::size_t{h} * w) {
      throw Error(ErrorKind::dimension_mismatch,
                  "bitmap has " + std::to_string(bits.size()) + " entries, expected " +
                      std::to_string(std::size_t{h} * w));
    }
  }

  bool get(std::uint32_t row, std::uint32_t col) const {
    return bits[std::size_t{row} * width + col] != 0;
  }
  void set(std::uint32_t row, std::uint32_t col, bool value = true) {
    bits[std::size_t{row} * width + col] = value ? 1 : 0;
  }

  friend bool operator==(const Bitmap& a, const Bitmap& b) {
    return a.height == b.height && a.width == b.width &&
           std::equal(a.bits.begin(), a.bits.end(), b.bits.begin(), b.bits.end(),
                      [](std::uint8_t x, std::uint8_t y) { return (x != 0) == (y != 0); });
  }
};

// Half-open foreground run [begin, end) in column-major pixel indices.
struct Run {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

class Mask {
 public:
  using Count = std::uint32_t;

  Mask() : counts_{0} {}

  // Validates the canonical-form invariants; throws malformed-counts.
  Mask(std::uint32_t height, std::uint32_t width, std::vector<Count> counts)
      : height_(height), width_(width), counts_(std::move(counts)) {
    const std::uint64_t pixels = std::uint64_t{height_} * width_;
    if (counts_.empty()) {
      throw Error(ErrorKind::malformed_counts, "counts must not be empty");
    }
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (i > 0 && counts_[i] == 0) {
        throw Error(ErrorKind::malformed_counts,
                    "zero run at position " + std::to_string(i) +
                        " (only the leading background run may be 0)");
      }
      sum += counts_[i];
      if (i % 2 == 1) area_ += counts_[i];
    }
    if (sum != pixels) {
      throw Error(ErrorKind::malformed_counts,
                  "counts sum to " + std::to_string(sum) + " but the grid has " +
                      std::to_string(pixels) + " pixels");
    }
    if (area_ > 0) {
      fg_begin_ = counts_[0];
      fg_end_ = pixels - (counts_.size() % 2 == 1 ? counts_.back() : 0);
    }
  }

  static Mask empty(std::uint32_t height, std::uint32_t width) {
    return Mask(height, width, {static_cast<Count>(std::uint64_t{height} * width)});
  }

  // Builds a mask from sorted, non-overlapping foreground runs. Adjacent runs
  // are coalesced and empty runs skipped.
  static Mask from_runs(std::uint32_t height, std::uint32_t width, std::span<const Run> runs) {
    const std::uint64_t pixels = std::uint64_t{height} * width;
    std::vector<Count> counts;
    counts.reserve(runs.size() * 2 + 1);
    std::uint64_t cursor = 0;
    bool open = false;  // last pushed entry is a foreground run
    for (const Run& run : runs) {
      if (run.end <= run.begin) continue;
      if (run.begin < cursor || run.end > pixels) {
        throw Error(ErrorKind::malformed_counts, "runs must be sorted, disjoint and in range");
      }
      if (open && run.begin == cursor) {
        counts.back() += static_cast<Count>(run.end - run.begin);
      } else {
        counts.push_back(static_cast<Count>(run.begin - cursor));
        counts.push_back(static_cast<Count>(run.end - run.begin));
      }
      open = true;
      cursor = run.end;
    }
    if (counts.empty() || cursor < pixels) counts.push_back(static_cast<Count>(pixels - cursor));
    return Mask(height, width, std::move(counts));
  }

  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t width() const noexcept { return width_; }
  const std::vector<Count>& counts() const noexcept { return counts_; }

  // Number of foreground pixels.
  std::uint64_t area() const noexcept { return area_; }

  // Span covering every foreground pixel; empty masks report [0, 0).
  std::uint64_t first_foreground() const noexcept { return fg_begin_; }
  std::uint64_t end_foreground() const noexcept { return fg_end_; }

  std::vector<Run> runs() const {
    std::vector<Run> out;
    out.reserve(counts_.size() / 2);
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (i % 2 == 1) out.push_back({pos, pos + counts_[i]});
      pos += counts_[i];
    }
    return out;
  }

  bool same_shape(const Mask& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.counts_ == b.counts_;
  }

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  std::vector<Count> counts_;
  std::uint64_t area_ = 0;
  std::uint64_t fg_begin_ = 0;
  std::uint64_t fg_end_ = 0;
};

inline void require_same_shape(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::dimension_mismatch,
                std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                    std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
}

inline Mask rle_encode(const Bitmap& bitmap) {
  const std::uint32_t h = bitmap.height;
  const std::uint32_t w = bitmap.width;
  std::vector<Mask::Count> counts;
  bool previous = false;
  Mask::Count run = 0;
  for (std::uint32_t col = 0; col < w; ++col) {
    for (std::uint32_t row = 0; row < h; ++row) {
      const bool value = bitmap.get(row, col);
      if (value != previous) {
        counts.push_back(run);
        run = 0;
        previous = value;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return Mask(h, w, std::move(counts));
}

inline Bitmap rle_decode(const Mask& mask) {
  Bitmap out(mask.height(), mask.width());
  const std::uint64_t h = mask.height();
  for (const Run& run : mask.runs()) {
    for (std::uint64_t idx = run.begin; idx < run.end; ++idx) {
      out.set(static_cast<std::uint32_t>(idx % h), static_cast<std::uint32_t>(idx / h));
    }
  }
  return out;
}

inline std::uint64_t area(const Mask& mask) noexcept { return mask.area(); }

namespace detail {

// Walks the foreground runs of a mask straight off its counts.
class RunCursor {
 public:
  explicit RunCursor(const Mask& mask) : counts_(mask.counts()) { advance(); }

  bool done() const noexcept { return done_; }
  const Run& run() const noexcept { return run_; }

  void advance() {
    if (index_ + 1 >= counts_.size()) {
      done_ = true;
      return;
    }
    pos_ += counts_[index_];
    run_ = {pos_, pos_ + counts_[index_ + 1]};
    pos_ = run_.end;
    index_ += 2;
  }

 private:
  const std::vector<Mask::Count>& counts_;
  std::size_t index_ = 0;
  std::uint64_t pos_ = 0;
  Run run_{};
  bool done_ = false;
};

}  // namespace detail

inline std::uint64_t intersection_area(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  if (a.area() == 0 || b.area() == 0) return 0;
  if (a.end_foreground() <= b.first_foreground() || b.end_foreground() <= a.first_foreground()) {
    return 0;
  }
  detail::RunCursor ca(a), cb(b);
  std::uint64_t total = 0;
  while (!ca.done() && !cb.done()) {
    const Run& ra = ca.run();
    const Run& rb = cb.run();
    const std::uint64_t lo = std::max(ra.begin, rb.begin);
    const std::uint64_t hi = std::min(ra.end, rb.end);
    if (hi > lo) total += hi - lo;
    if (ra.end < rb.end) {
      ca.advance();
    } else {
      cb.advance();
    }
  }
  return total;
}

inline std::uint64_t union_area(const Mask& a, const Mask& b) {
  return a.area() + b.area() - intersection_area(a, b);
}

// Intersection over union, computed on the run-length form. Two empty masks
// have IoU 0 so that empty segments never count as matches.
inline double iou(const Mask& a, const Mask& b) {
  const std::uint64_t inter = intersection_area(a, b);
  const std::uint64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline bool overlaps(const Mask& a, const Mask& b) { return intersection_area(a, b) > 0; }

inline Mask mask_intersection(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  std::vector<Run> out;
  detail::RunCursor ca(a), cb(b);
  while (!ca.done() && !cb.done()) {
    const Run& ra = ca.run();
    const Run& rb = cb.run();
    const std::uint64_t lo = std::max(ra.begin, rb.begin);
    const std::uint64_t hi = std::min(ra.end, rb.end);
    if (hi > lo) out.push_back({lo, hi});
    if (ra.end < rb.end) {
      ca.advance();
    } else {
      cb.advance();
    }
  }
  return Mask::from_runs(a.height(), a.width(), out);
}

inline Mask mask_union(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  std::vector<Run> out;
  detail::RunCursor ca(a), cb(b);
  auto push = [&out](const Run& r) {
    if (!out.empty() && r.begin <= out.back().end) {
      out.back().end = std::max(out.back().end, r.end);
    } else {
      out.push_back(r);
    }
  };
  while (!ca.done() || !cb.done()) {
    if (cb.done() || (!ca.done() && ca.run().begin <= cb.run().begin)) {
      push(ca.run());
      ca.advance();
    } else {
      push(cb.run());
      cb.advance();
    }
  }
  return Mask::from_runs(a.height(), a.width(), out);
}

// Pixels of a that are not in b.
inline Mask mask_difference(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  if (b.area() == 0 || a.area() == 0) return a;
  std::vector<Run> out;
  detail::RunCursor cb(b);
  for (Run ra : a.runs()) {
    while (!cb.done() && cb.run().end <= ra.begin) cb.advance();
    detail::RunCursor probe = cb;
    while (!probe.done() && probe.run().begin < ra.end) {
      const Run& rb = probe.run();
      if (rb.begin > ra.begin) out.push_back({ra.begin, rb.begin});
      ra.begin = std::max(ra.begin, rb.end);
      if (ra.begin >= ra.end) break;
      probe.advance();
    }
    if (ra.end > ra.begin) out.push_back(ra);
  }
  return Mask::from_runs(a.height(), a.width(), out);
}

// Union of any number of same-shape masks. Returns an empty mask of the given
// shape when the list is empty.
inline Mask mask_union(std::span<const Mask> masks, std::uint32_t height, std::uint32_t width) {
  Mask acc = Mask::empty(height, width);
  for (const Mask& m : masks) acc = mask_union(acc, m);
  return acc;
}

// Axis-aligned rectangle clipped to the grid.
inline Mask rectangle_mask(std::uint32_t height, std::uint32_t width, std::int64_t top,
                           std::int64_t left, std::int64_t rect_height, std::int64_t rect_width) {
  const std::int64_t r0 = std::clamp<std::int64_t>(top, 0, height);
  const std::int64_t r1 = std::clamp<std::int64_t>(top + rect_height, 0, height);
  const std::int64_t c0 = std::clamp<std::int64_t>(left, 0, width);
  const std::int64_t c1 = std::clamp<std::int64_t>(left + rect_width, 0, width);
  std::vector<Run> runs;
  if (r1 > r0) {
    runs.reserve(static_cast<std::size_t>(std::max<std::int64_t>(c1 - c0, 0)));
    for (std::int64_t c = c0; c < c1; ++c) {
      const std::uint64_t base = static_cast<std::uint64_t>(c) * height;
      runs.push_back({base + static_cast<std::uint64_t>(r0), base + static_cast<std::uint64_t>(r1)});
    }
  }
  return Mask::from_runs(height, width, runs);
}

// Shifts foreground by (dy, dx); pixels leaving the grid are dropped.
inline Mask translate(const Mask& mask, std::int64_t dy, std::int64_t dx) {
  const std::int64_t h = mask.height();
  const std::int64_t w = mask.width();
  std::vector<Run> runs;
  for (const Run& run : mask.runs()) {
    // A run may span several columns; split it per column.
    std::uint64_t pos = run.begin;
    while (pos < run.end) {
      const std::int64_t col = static_cast<std::int64_t>(pos / h);
      const std::int64_t row = static_cast<std::int64_t>(pos % h);
      const std::uint64_t col_end = static_cast<std::uint64_t>(col + 1) * h;
      const std::uint64_t seg_end = std::min(run.end, col_end);
      const std::int64_t len = static_cast<std::int64_t>(seg_end - pos);
      const std::int64_t nc = col + dx;
      const std::int64_t nr0 = std::clamp<std::int64_t>(row + dy, 0, h);
      const std::int64_t nr1 = std::clamp<std::int64_t>(row + dy + len, 0, h);
      if (nc >= 0 && nc < w && nr1 > nr0) {
        const std::uint64_t base = static_cast<std::uint64_t>(nc) * h;
        runs.push_back({base + static_cast<std::uint64_t>(nr0), base + static_cast<std::uint64_t>(nr1)});
      }
      pos = seg_end;
    }
  }
  // Column order is preserved by a pure translation, so runs stay sorted.
  return Mask::from_runs(mask.height(), mask.width(), runs);
}

namespace detail {

using RowInterval = std::pair<std::int64_t, std::int64_t>;  // [begin, end) rows
using ColumnIntervals = std::map<std::int64_t, std::vector<RowInterval>>;

inline void merge_intervals(std::vector<RowInterval>& v) {
  std::sort(v.begin(), v.end());
  std::size_t k = 0;
  for (const RowInterval& iv : v) {
    if (k > 0 && iv.first <= v[k - 1].second) {
      v[k - 1].second = std::max(v[k - 1].second, iv.second);
    } else {
      v[k++] = iv;
    }
  }
  v.resize(k);
}

inline std::vector<RowInterval> intersect_intervals(const std::vector<RowInterval>& a,
                                                    const std::vector<RowInterval>& b) {
  std::vector<RowInterval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const std::int64_t lo = std::max(a[i].first, b[j].first);
    const std::int64_t hi = std::min(a[i].second, b[j].second);
    if (lo < hi) out.push_back({lo, hi});
    (a[i].second < b[j].second) ? ++i : ++j;
  }
  return out;
}

}  // namespace detail

// Morphological dilation (radius > 0) or erosion (radius < 0) with a square
// (2r+1)x(2r+1) structuring element. Pixels outside the grid count as
// background. Works on per-column row intervals, so the cost scales with the
// mask's run count rather than the grid size.
inline Mask morph(const Mask& mask, int radius) {
  if (radius == 0 || mask.area() == 0) return mask;
  const std::int64_t h = mask.height();
  const std::int64_t w = mask.width();
  const bool dilate = radius > 0;
  const std::int64_t r = dilate ? radius : -static_cast<std::int64_t>(radius);

  detail::ColumnIntervals cols;
  for (const Run& run : mask.runs()) {
    for (std::uint64_t b = run.begin; b < run.end;) {
      const auto col = static_cast<std::int64_t>(b / static_cast<std::uint64_t>(h));
      const std::uint64_t base = static_cast<std::uint64_t>(col * h);
      const std::uint64_t e = std::min<std::uint64_t>(run.end, base + static_cast<std::uint64_t>(h));
      cols[col].push_back({static_cast<std::int64_t>(b - base), static_cast<std::int64_t>(e - base)});
      b = e;
    }
  }

  // Vertical pass.
  for (auto it = cols.begin(); it != cols.end();) {
    std::vector<detail::RowInterval> next;
    for (const auto& [a, b] : it->second) {
      const std::int64_t lo = dilate ? std::max<std::int64_t>(0, a - r) : a + r;
      const std::int64_t hi = dilate ? std::min(h, b + r) : b - r;
      if (lo < hi) next.push_back({lo, hi});
    }
    if (dilate) detail::merge_intervals(next);
    if (next.empty()) {
      it = cols.erase(it);
    } else {
      it->second = std::move(next);
      ++it;
    }
  }

  // Horizontal pass.
  detail::ColumnIntervals out;
  if (dilate) {
    for (const auto& [c, v] : cols) {
      for (std::int64_t x = std::max<std::int64_t>(0, c - r); x <= std::min(w - 1, c + r); ++x) {
        auto& dst = out[x];
        dst.insert(dst.end(), v.begin(), v.end());
      }
    }
    for (auto& [x, v] : out) detail::merge_intervals(v);
  } else {
    for (const auto& [c, v] : cols) {
      if (c - r < 0 || c + r >= w) continue;
      std::vector<detail::RowInterval> acc = v;
      for (std::int64_t x = c - r; x <= c + r && !acc.empty(); ++x) {
        if (x == c) continue;
        const auto found = cols.find(x);
        acc = found == cols.end() ? std::vector<detail::RowInterval>{} : detail::intersect_intervals(acc, found->second);
      }
      if (!acc.empty()) out[c] = std::move(acc);
    }
  }

  std::vector<Run> runs;
  for (const auto& [x, v] : out) {
    for (const auto& [a, b] : v) {
      runs.push_back({static_cast<std::uint64_t>(x * h + a), static_cast<std::uint64_t>(x * h + b)});
    }
  }
  return Mask::from_runs(mask.height(), mask.width(), runs);
}

}  // namespace ospa_eval
