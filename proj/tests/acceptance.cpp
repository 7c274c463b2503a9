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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails. Oracles are independent of the library code under test.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "ospa_eval.hpp"

namespace {

using namespace ospa_eval;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Taxonomy fixture_taxonomy() {
  return Taxonomy({{"person", 1, ClassKind::thing, ClassSplit::known},
                   {"chair", 2, ClassKind::thing, ClassSplit::unknown},
                   {"floor", 3, ClassKind::stuff, ClassSplit::known},
                   {"glass", 4, ClassKind::stuff, ClassSplit::unknown}});
}

Segment seg(Mask m, std::string cls, std::optional<std::int64_t> id = std::nullopt, int layer = 0) {
  return Segment{std::move(m), std::move(cls), id, layer};
}

// 1 -------------------------------------------------------------------------
Outcome assignment_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> small(1, 6), large(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    std::size_t m = small(rng), n = large(rng);
    if (k % 2) std::swap(m, n);
    CostMatrix c(m, n);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c.set(i, j, rows[i][j] = u(rng));
    const double fast = solve_assignment(c).total_cost;
    worst = std::max({worst, std::abs(fast - brute_force_assignment(c).total_cost),
                      std::abs(fast - oracle::brute_min_cost(rows))});
  }
  const double t = seconds_since(start);
  return {worst <= 1e-12 && t < 10.0, "max |diff| " + fmt(worst) + ", " + fmt(t) + " s"};
}

// 2 -------------------------------------------------------------------------
Outcome ospa_axioms() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260102);
  std::uniform_int_distribution<std::size_t> count(0, 4);
  auto random_set = [&] {
    std::vector<Mask> out(count(rng));
    for (Mask& m : out) m = oracle::random_blob_mask(rng, 16, 16);
    return out;
  };
  int symmetry = 0, identity = 0, triangle = 0;
  double worst_excess = -1.0;
  for (int k = 0; k < 200; ++k) {
    const auto x = random_set(), y = random_set(), z = random_set();
    const double xy = ospa_set_distance(x, y).total, yx = ospa_set_distance(y, x).total;
    if (xy != yx) ++symmetry;
    if (ospa_set_distance(x, x).total != 0.0) ++identity;
    // Distinct multisets must be at positive distance.
    std::vector<Mask> shuffled = y;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (ospa_set_distance(y, shuffled).total != 0.0) ++identity;
    auto key = [](std::vector<Mask> v) {
      std::vector<std::vector<std::uint32_t>> out;
      for (const Mask& m : v) out.push_back(m.counts());
      std::sort(out.begin(), out.end());
      return out;
    };
    if ((xy == 0.0) != (key(x) == key(y))) ++identity;
    const double excess = ospa_set_distance(x, z).total - (xy + ospa_set_distance(y, z).total);
    worst_excess = std::max(worst_excess, excess);
    if (excess > 1e-12) ++triangle;
  }
  const double t = seconds_since(start);
  return {symmetry == 0 && identity == 0 && triangle == 0 && t < 30.0,
          "symmetry violations " + std::to_string(symmetry) + ", identity violations " + std::to_string(identity) +
              ", triangle violations " + std::to_string(triangle) + " (max excess " + fmt(worst_excess) + "), " +
              fmt(t) + " s"};
}

// 3 -------------------------------------------------------------------------
Outcome analytic_degradation() {
  const Taxonomy tax = fixture_taxonomy();
  std::string bad;
  for (int k = 0; k <= 20; ++k) {
    std::vector<FrameAnnotation> gt, pred;
    for (int t = 0; t < 10; ++t) {
      FrameAnnotation g{t, 64, 80, {}}, p{t, 64, 80, {}};
      for (int i = 0; i < 20; ++i) {
        const Mask m = rectangle_mask(64, 80, (i / 5) * 16 + 2, (i % 5) * 16 + 2, 10 + i % 3, 9 + i % 4);
        g.segments.push_back(seg(m, "person", i + 1));
        if (i >= k) p.segments.push_back(seg(m, "person", i + 1));
      }
      gt.push_back(std::move(g));
      pred.push_back(std::move(p));
    }
    const auto r = ospa_ps_dataset(gt, pred, tax);
    if (r.overall.total != k / 20.0 || r.overall.loc != 0.0 || r.overall.card != k / 20.0) {
      bad += " k=" + std::to_string(k) + ":" + fmt(r.overall.total);
    }
  }
  return {bad.empty(), bad.empty() ? "O_PS == k/20 bit-exactly, loc == 0, for k = 0..20 over 10 frames"
                                   : "mismatches" + bad};
}

// 4 -------------------------------------------------------------------------
Outcome temporal_fixtures() {
  const Taxonomy tax = fixture_taxonomy();
  const Mask a = rectangle_mask(24, 24, 2, 2, 8, 8);
  SequenceAnnotation gt{"s", 24, 24, {}}, pred{"s", 24, 24, {}};
  for (std::int64_t t = 1; t <= 6; ++t) {
    gt.frames.push_back({t, 24, 24, {seg(a, "person", 1)}});
    pred.frames.push_back({t, 24, 24, {seg(a, "person", t <= 3 ? 1 : 2)}});
  }
  const auto r = ospa2_pt(gt, pred, tax);
  // Independent value: frame-wise distances and brute-force OSPA.
  std::map<std::int64_t, Mask> full, first, second;
  for (std::int64_t t = 1; t <= 6; ++t) (t <= 3 ? first : second)[t] = full[t] = a;
  const double d1 = oracle::track_distance(full, first), d2 = oracle::track_distance(full, second);
  const auto o = oracle::ospa(1, 2, [&](std::size_t, std::size_t j) { return j == 0 ? d1 : d2; });

  std::map<std::int64_t, Mask> x, y;
  for (std::int64_t t : {1, 2, 3, 4}) x[t] = a;
  for (std::int64_t t : {3, 4, 5, 6}) y[t] = a;
  const double shifted = track_distance(Track{"person", 1, x}, Track{"person", 2, y});
  const double shifted_oracle = oracle::track_distance(x, y);

  const bool ok = std::abs(r.mean.total - 0.75) <= 1e-12 && std::abs(r.mean.loc - 0.25) <= 1e-12 &&
                  std::abs(r.mean.card - 0.5) <= 1e-12 && std::abs(o.total - 0.75) <= 1e-12 &&
                  std::abs(shifted - 2.0 / 3.0) <= 1e-12 && std::abs(shifted_oracle - 2.0 / 3.0) <= 1e-12;
  return {ok, "split track total/loc/card " + fmt(r.mean.total) + "/" + fmt(r.mean.loc) + "/" + fmt(r.mean.card) +
                  ", shifted-domain distance " + fmt(shifted)};
}

// 5 -------------------------------------------------------------------------
Outcome baseline_sanity() {
  const Taxonomy tax = fixture_taxonomy();
  std::ostringstream detail;
  bool ok = true;

  SynthParams p;
  p.seed = 77;
  p.frames = 6;
  p.height = 120;
  p.width = 160;
  p.thing_classes = 2;
  p.objects_max = 4;
  p.size_max = 24;
  const Taxonomy stax = synth_taxonomy(p);
  const SequenceAnnotation g = flatten_multilabel(generate(p), stax);
  const double perfect_pq = pq(align_frames(g.frames, g.frames).pairs, stax).all.pq;
  const double perfect_stq = stq(g, g, stax).stq;
  const IdentityResult perfect_id = idf1_frag(g, g, stax);
  ok &= perfect_pq == 1.0 && perfect_stq == 1.0 && perfect_id.idf1 == 1.0 && perfect_id.frag == 0;
  detail << "perfect PQ " << perfect_pq << " STQ " << perfect_stq << " IDF1 " << perfect_id.idf1 << " Frag "
         << perfect_id.frag;

  const Mask gm = rectangle_mask(32, 32, 0, 0, 10, 10);
  const FrameAnnotation gf{0, 32, 32, {seg(gm, "person", 1)}};
  const FrameAnnotation pf{0, 32, 32, {seg(rectangle_mask(32, 32, 0, 0, 10, 8), "person", 1),
                                       seg(rectangle_mask(32, 32, 20, 20, 5, 5), "person", 2)}};
  const double pq_fixture = pq({{gf, pf}}, tax).all.pq;
  const double pq_expected = 0.8 / 1.5;
  ok &= std::abs(pq_fixture - pq_expected) <= 1e-9;
  detail << "; PQ fixture " << fmt(pq_fixture) << " (expected " << fmt(pq_expected) << ")";

  auto track_seq = [](const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& tracks) {
    const Mask m = rectangle_mask(16, 16, 0, 0, 8, 8);
    SequenceAnnotation s{"s", 16, 16, {}};
    for (std::int64_t t = 1; t <= 10; ++t) {
      FrameAnnotation f{t, 16, 16, {}};
      for (const auto& [id, frames] : tracks)
        if (std::find(frames.begin(), frames.end(), t) != frames.end()) f.segments.push_back(seg(m, "person", id));
      s.frames.push_back(std::move(f));
    }
    return s;
  };
  const auto gt10 = track_seq({{1, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}});
  const IdentityResult gaps = idf1_frag(gt10, track_seq({{5, {1, 2, 5, 6, 9, 10}}}), tax);
  ok &= std::abs(gaps.idf1 - 0.75) <= 1e-9 && gaps.frag == 2;
  detail << "; IDF1 gap fixture " << fmt(gaps.idf1) << " Frag " << gaps.frag << " (expected 0.75, 2)";

  const IdentityResult split = idf1_frag(gt10, track_seq({{5, {1, 2, 3, 4, 5}}, {6, {6, 7, 8, 9, 10}}}), tax);
  const bool split_ok = std::abs(split.idf1 - 2.0 / 3.0) <= 1e-9;
  ok &= split_ok;
  detail << "; IDF1 split fixture " << fmt(split.idf1) << " (expected 2/3"
         << (split_ok ? ")" : "; the standard identity F1 with both 5-frame pred tracks counted is 2*5/(10+10) = 0.5)");
  return {ok, detail.str()};
}

// 6 -------------------------------------------------------------------------
Outcome stuff_independence() {
  SynthParams p;
  p.seed = 606;
  p.frames = 8;
  p.height = 120;
  p.width = 160;
  p.thing_classes = 3;
  p.stuff_classes = 3;
  p.objects_max = 4;
  p.size_max = 24;
  const Taxonomy tax = synth_taxonomy(p);
  const SequenceAnnotation gt = generate(p);
  const SequenceAnnotation a = perturb(gt, tax, {0.1, 0.0, 0.0, 2, 1}, 1);
  SequenceAnnotation b = a;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::int64_t> id(1000, 100000);
  for (auto& f : b.frames)
    for (auto& s : f.segments)
      if (s.track_id) {
        // A different id per frame: maximal disagreement in thing tracking.
        s.track_id = id(rng) * 1000 + f.frame_id;
      }
  const Dataset dg{"gt", {gt}, {}}, da{"a", {a}, {}}, db{"b", {b}, {}};
  const json ra = evaluate_pt(dg, da, tax, {})["metrics"], rb = evaluate_pt(dg, db, tax, {})["metrics"];
  const bool same = ra["O2_PT_stuff"].dump() == rb["O2_PT_stuff"].dump();
  const bool thing_differs = ra["O2_PT_thing"]["total"] != rb["O2_PT_thing"]["total"];
  return {same && thing_differs, "O2_PT_stuff " + ra["O2_PT_stuff"]["total"].dump() + " vs " +
                                     rb["O2_PT_stuff"]["total"].dump() + "; O2_PT_thing " +
                                     ra["O2_PT_thing"]["total"].dump() + " vs " + rb["O2_PT_thing"]["total"].dump()};
}

// 7 -------------------------------------------------------------------------
Outcome multilabel_protocol() {
  const Taxonomy tax = fixture_taxonomy();
  const char* names[] = {"person", "chair", "floor", "glass"};
  std::mt19937_64 rng(707);
  int idempotence = 0, conservation = 0, disjoint = 0, thing_priority = 0;
  for (int k = 0; k < 200; ++k) {
    FrameAnnotation f{0, 16, 16, {}};
    std::uniform_int_distribution<int> count(1, 6), cls(0, 3), layer(0, 2);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const int c = cls(rng);
      f.segments.push_back(seg(oracle::random_blob_mask(rng, 16, 16), names[c],
                               c < 2 ? std::optional<std::int64_t>(i) : std::nullopt, layer(rng)));
    }
    const FrameAnnotation once = flatten_multilabel(f, tax);
    if (!(flatten_multilabel(once, tax) == once)) ++idempotence;
    Bitmap in(16, 16), out(16, 16), thing_in(16, 16), thing_out(16, 16);
    std::size_t out_pixels = 0;
    for (const auto& s : f.segments) {
      const Bitmap b = oracle::decode(s.mask);
      for (std::size_t i = 0; i < b.bits.size(); ++i) {
        in.bits[i] |= b.bits[i];
        if (tax.at(s.class_name).is_thing()) thing_in.bits[i] |= b.bits[i];
      }
    }
    for (const auto& s : once.segments) {
      const Bitmap b = oracle::decode(s.mask);
      out_pixels += oracle::bitmap_area(b);
      for (std::size_t i = 0; i < b.bits.size(); ++i) {
        out.bits[i] |= b.bits[i];
        if (tax.at(s.class_name).is_thing()) thing_out.bits[i] |= b.bits[i];
      }
    }
    if (!(in == out)) ++conservation;
    if (out_pixels != oracle::bitmap_area(out)) ++disjoint;
    if (!(thing_in == thing_out)) ++thing_priority;
  }

  // Chair (thing, layer 1) seen through glass (stuff, layer 0); the person is
  // elsewhere. The prediction labels the glass pane as a whole.
  const Mask chair = rectangle_mask(32, 32, 10, 10, 8, 8);
  const Mask glass = rectangle_mask(32, 32, 6, 6, 16, 16);
  const Mask person = rectangle_mask(32, 32, 0, 24, 8, 6);
  const Mask floor = rectangle_mask(32, 32, 26, 0, 6, 32);
  const FrameAnnotation gt{0, 32, 32, {seg(glass, "glass", std::nullopt, 0), seg(chair, "chair", 1, 1),
                                       seg(person, "person", 2, 0), seg(floor, "floor", std::nullopt, 0)}};
  const FrameAnnotation pred{0, 32, 32, {seg(glass, "glass"), seg(rectangle_mask(32, 32, 10, 11, 8, 8), "chair", 5),
                                         seg(person, "person", 6), seg(floor, "floor")}};
  const FrameOspa raw = ospa_ps(gt, pred, tax), flat = ospa_ps(flatten_multilabel(gt, tax), pred, tax);
  std::set<std::string> differing, stuff_touched;
  for (const auto& [name, c] : raw.per_class)
    if (!(flat.per_class.at(name) == c)) differing.insert(name);
  for (const Segment& s : gt.segments) {
    if (tax.at(s.class_name).is_thing()) continue;
    for (const Segment& t : gt.segments)
      if (tax.at(t.class_name).is_thing() && overlaps(s.mask, t.mask)) stuff_touched.insert(s.class_name);
  }
  bool only_stuff = true;
  for (const auto& name : differing) only_stuff &= tax.at(name).is_stuff();
  const bool ok = idempotence == 0 && conservation == 0 && disjoint == 0 && thing_priority == 0 && only_stuff &&
                  differing == stuff_touched && !differing.empty();
  std::string diff_list;
  for (const auto& name : differing) diff_list += " " + name;
  return {ok, "200 random frames: idempotence/conservation/overlap/thing-priority violations " +
                  std::to_string(idempotence) + "/" + std::to_string(conservation) + "/" + std::to_string(disjoint) +
                  "/" + std::to_string(thing_priority) + "; glass fixture differing classes:" + diff_list +
                  " (raw " + fmt(raw.mean.total) + ", flattened " + fmt(flat.mean.total) + ")"};
}

// 8 -------------------------------------------------------------------------
Outcome determinism_performance() {
  SynthParams p;
  p.seed = 808;
  p.frames = 1000;
  p.thing_classes = 4;
  p.stuff_classes = 4;
  p.objects_min = p.objects_max = 19;  // 76 things + 4 stuff bands = 80 masks
  p.size_min = 12;
  p.size_max = 48;
  p.motion_step = 3;
  const Taxonomy tax = synth_taxonomy(p);
  const SequenceAnnotation gt = generate(p);
  std::size_t min_masks = SIZE_MAX;
  for (const auto& f : gt.frames) min_masks = std::min(min_masks, f.segments.size());
  const Dataset dg{"gt", {gt}, {}};
  const Dataset dp{"pred", {perturb(gt, tax, {0.1, 0.05, 0.05, 3, 1}, 809)}, {}};

  auto timed = [&](std::size_t workers, double& secs) {
    EvalConfig config;
    config.workers = workers;
    const auto start = Clock::now();
    std::string text = evaluate_ps(dg, dp, tax, config).dump(2);
    secs = seconds_since(start);
    return text;
  };
  double t1 = 0, t4 = 0, t8 = 0;
  const std::string r1 = timed(1, t1);
  const std::string r8 = timed(8, t8);
  const std::string r4 = timed(4, t4);
  const double speedup = t1 / t4;
  const bool identical = r1 == r8 && r1 == r4;
  const bool ok = min_masks == 80 && t1 <= 60.0 && identical && speedup >= 2.0;
  return {ok, "1000 frames x " + std::to_string(min_masks) + " masks: 1 worker " + fmt(t1) + " s, 4 workers " +
                  fmt(t4) + " s (speedup " + fmt(speedup) + ", " +
                  std::to_string(std::thread::hardware_concurrency()) + " hardware threads), reports " +
                  (identical ? "byte-identical" : "DIFFER") + " at 1/4/8 workers"};
}

// 9 -------------------------------------------------------------------------
Outcome monotonicity() {
  const double probs[] = {0.0, 0.1, 0.25, 0.5, 1.0};
  double means[5] = {0, 0, 0, 0, 0};
  SynthParams p;
  p.frames = 4;
  p.height = 240;
  p.width = 320;
  p.thing_classes = 2;
  p.objects_min = 5;
  p.objects_max = 10;
  bool exact_one = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    p.seed = seed;
    const Taxonomy tax = synth_taxonomy(p);
    const SequenceAnnotation gt = generate(p);
    for (int k = 0; k < 5; ++k) {
      const SequenceAnnotation pred = perturb(gt, tax, {probs[k], 0, 0, 0, 0}, seed + 5000);
      const double v = ospa_ps_dataset(gt.frames, pred.frames, tax).overall.total;
      means[k] += v;
      if (k == 4) exact_one &= v == 1.0;
    }
  }
  for (double& m : means) m /= 50.0;
  bool monotone = true;
  for (int k = 1; k < 5; ++k) monotone &= means[k] >= means[k - 1];
  return {monotone && exact_one, "mean O_PS " + fmt(means[0]) + " <= " + fmt(means[1]) + " <= " + fmt(means[2]) +
                                     " <= " + fmt(means[3]) + " <= " + fmt(means[4]) +
                                     (exact_one ? "; every drop_prob=1 run is exactly 1" : "; drop_prob=1 not exactly 1")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"assignment oracle equivalence", assignment_oracle},
      {"OSPA metric axioms", ospa_axioms},
      {"analytic degradation k/20", analytic_degradation},
      {"OSPA2 temporal fixtures", temporal_fixtures},
      {"baseline metric sanity", baseline_sanity},
      {"stuff tracker-independence", stuff_independence},
      {"multi-label protocol", multilabel_protocol},
      {"determinism and performance", determinism_performance},
      {"monotonicity in drop_prob", monotonicity},
  };
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
