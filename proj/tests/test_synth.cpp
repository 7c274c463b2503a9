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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace {

using namespace ospa_eval;

SynthParams small_params(std::uint64_t seed) {
  SynthParams p;
  p.seed = seed;
  p.frames = 6;
  p.height = 120;
  p.width = 160;
  p.thing_classes = 2;
  p.stuff_classes = 2;
  p.objects_min = 2;
  p.objects_max = 4;
  p.size_min = 6;
  p.size_max = 16;
  return p;
}

TEST(Rng, ReferenceStream) {
  // xoshiro256** seeded through splitmix64 from 0; the first outputs are fixed
  // by the generator definition and must never change.
  std::uint64_t x = 0;
  auto splitmix = [&x] {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s[4] = {splitmix(), splitmix(), splitmix(), splitmix()};
  auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
  auto next = [&] {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  };
  std::uint64_t probe = 0;
  EXPECT_EQ(Rng::splitmix64(probe), 0xe220a8397b1dcdafULL);
  Rng rng(0);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(rng.next(), next());
}

TEST(Generate, SingleObjectSingleFrame) {
  SynthParams p;
  p.frames = 1;
  p.stuff_classes = 0;
  const Taxonomy tax = synth_taxonomy(p);
  const auto seq = generate(p);
  ASSERT_EQ(seq.frames.size(), 1u);
  ASSERT_EQ(seq.frames[0].segments.size(), 1u);
  EXPECT_EQ(build_tracks(seq, tax).size(), 1u);
}

TEST(Generate, Deterministic) {
  EXPECT_EQ(sequence_to_json(generate(small_params(3))).dump(), sequence_to_json(generate(small_params(3))).dump());
  EXPECT_NE(generate(small_params(3)), generate(small_params(4)));
}

TEST(Generate, EightyMasksPerFrame) {
  SynthParams p;
  p.seed = 1;
  p.frames = 3;
  p.thing_classes = 4;
  p.stuff_classes = 4;
  p.objects_min = p.objects_max = 19;
  const auto seq = generate(p);
  for (const auto& f : seq.frames) EXPECT_EQ(f.segments.size(), 80u);
}

TEST(Generate, PassesLoaderValidation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SynthParams p = small_params(seed);
    const Taxonomy tax = synth_taxonomy(p);
    const ParsedSequence parsed = parse_sequence(sequence_to_json(generate(p)), tax);
    EXPECT_TRUE(parsed.issues.empty());
  }
}

TEST(Generate, ConsistentTrackIdsAndBoundedMotion) {
  const SynthParams p = small_params(9);
  const auto seq = generate(p);
  std::map<std::int64_t, Mask> last;
  for (const auto& f : seq.frames) {
    for (const auto& s : f.segments) {
      if (!s.track_id) continue;
      auto it = last.find(*s.track_id);
      if (it != last.end()) {
        // A rectangle of constant size moving at most motion_step per axis.
        EXPECT_EQ(s.mask.area(), it->second.area());
        EXPECT_TRUE(s.mask == it->second || iou(s.mask, it->second) > 0.0);
      }
      last[*s.track_id] = s.mask;
    }
  }
}

TEST(Generate, InfeasibleParams) {
  SynthParams p;
  p.height = 40;
  p.width = 40;
  p.objects_min = p.objects_max = 50;
  try {
    generate(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible_params);
  }
}

TEST(Perturb, ZeroParamsIsIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SynthParams p = small_params(seed);
    const auto gt = generate(p);
    EXPECT_EQ(perturb(gt, synth_taxonomy(p), {}, seed), gt);
  }
}

TEST(Perturb, DropAllEmptiesEveryFrame) {
  const SynthParams p = small_params(2);
  const Taxonomy tax = synth_taxonomy(p);
  const auto gt = generate(p);
  const auto pred = perturb(gt, tax, {1.0, 0, 0, 0, 0}, 1);
  ASSERT_EQ(pred.frames.size(), gt.frames.size());
  for (std::size_t i = 0; i < pred.frames.size(); ++i) {
    EXPECT_TRUE(pred.frames[i].segments.empty());
    EXPECT_EQ(pred.frames[i].frame_id, gt.frames[i].frame_id);
  }
  const auto r = ospa_ps_dataset(gt.frames, pred.frames, tax);
  EXPECT_EQ(r.overall.total, 1.0);
}

TEST(Perturb, QuarterDropGivesQuarterError) {
  SynthParams p;
  p.frames = 4;
  p.objects_min = p.objects_max = 20;
  p.size_min = 8;
  p.size_max = 24;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    p.seed = seed;
    const Taxonomy tax = synth_taxonomy(p);
    const auto gt = generate(p);
    const auto r = ospa_ps_dataset(gt.frames, perturb(gt, tax, {0.25, 0, 0, 0, 0}, seed + 1000).frames, tax);
    EXPECT_EQ(r.overall.loc, 0.0);
    sum += r.overall.total;
  }
  EXPECT_NEAR(sum / 50.0, 0.25, 0.03);
}

TEST(Perturb, OutputsSatisfyLoaderInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SynthParams p = small_params(seed);
    const Taxonomy tax = synth_taxonomy(p);
    const auto pred = perturb(generate(p), tax, {0.2, 0.3, 0.3, 4, 2}, seed);
    const ParsedSequence parsed = parse_sequence(sequence_to_json(pred), tax);
    EXPECT_TRUE(parsed.issues.empty()) << (parsed.issues.empty() ? "" : parsed.issues[0].message);
  }
}

TEST(Perturb, IdSwitchPersists) {
  const SynthParams p = small_params(5);
  const Taxonomy tax = synth_taxonomy(p);
  const auto gt = generate(p);
  const auto pred = perturb(gt, tax, {0, 1.0, 0, 0, 0}, 5);
  // Every frame re-switches, so ids never repeat across frames but masks stay
  // perfect: O_PS is zero while IDF1 collapses.
  EXPECT_EQ(ospa_ps_dataset(gt.frames, pred.frames, tax).overall.total, 0.0);
  EXPECT_LT(idf1_frag(flatten_multilabel(gt, tax), flatten_multilabel(pred, tax), tax).idf1, 0.5);
}

TEST(Perturb, ClassFlipKeepsKind) {
  const SynthParams p = small_params(6);
  const Taxonomy tax = synth_taxonomy(p);
  const auto gt = generate(p);
  const auto pred = perturb(gt, tax, {0, 0, 1.0, 0, 0}, 6);
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    ASSERT_EQ(gt.frames[t].segments.size(), pred.frames[t].segments.size());
    for (std::size_t i = 0; i < gt.frames[t].segments.size(); ++i) {
      const auto& a = gt.frames[t].segments[i];
      const auto& b = pred.frames[t].segments[i];
      EXPECT_NE(a.class_name, b.class_name);
      EXPECT_EQ(tax.at(a.class_name).kind, tax.at(b.class_name).kind);
    }
  }
}

}  // namespace
