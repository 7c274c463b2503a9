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

// ospa-eval: command-line front end.
//
// Exit codes: 0 success, 2 validation or configuration error (an error list
// is printed to stderr as JSON), 1 internal error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ospa_eval.hpp"

namespace fs = std::filesystem;
using ospa_eval::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

void print_issues(const std::vector<ospa_eval::Issue>& issues) {
  json errors = json::array();
  for (const auto& i : issues) errors.push_back({{"kind", ospa_eval::to_string(i.kind)}, {"message", i.message}});
  std::cerr << json{{"errors", errors}}.dump(2) << "\n";
}

struct EvalFlags {
  std::string gt, pred, taxonomy, out;
  std::string subset = "all";
  std::string flatten;  // empty: per-family default
  std::string format = "json";
  std::string world = "closed";
  std::string window = "union";
  bool scale_breakdown = false;
  std::size_t workers = ospa_eval::default_workers();
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f, bool tracking) {
  cmd->add_option("--gt", f.gt, "ground-truth manifest")->required();
  cmd->add_option("--pred", f.pred, "prediction manifest")->required();
  cmd->add_option("--taxonomy", f.taxonomy, "taxonomy file")->required();
  cmd->add_option("--subset", f.subset, "class subset")->check(CLI::IsMember({"all", "thing", "stuff", "known", "unknown"}));
  cmd->add_option("--flatten", f.flatten, "flatten multi-label input for every metric (on) or none (off)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--workers", f.workers, "worker threads (default: $OSPA_EVAL_WORKERS or 1)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "report path (default: stdout)");
  cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--world", f.world, "closed: unknown class names are errors; open: dropped with a warning")
      ->check(CLI::IsMember({"closed", "open"}));
  if (tracking) {
    cmd->add_option("--window", f.window, "track distance window")->check(CLI::IsMember({"union", "sequence"}));
  } else {
    cmd->add_flag("--scale-breakdown", f.scale_breakdown, "add small/medium/large OSPA buckets");
  }
}

ospa_eval::EvalConfig to_config(const EvalFlags& f) {
  ospa_eval::EvalConfig c;
  c.subset = *ospa_eval::parse_subset(f.subset);
  c.scale_breakdown = f.scale_breakdown;
  if (!f.flatten.empty()) c.flatten = f.flatten == "on";
  c.workers = f.workers;
  c.vocabulary = f.world == "open" ? ospa_eval::Vocabulary::open : ospa_eval::Vocabulary::closed;
  c.window = f.window == "sequence" ? ospa_eval::TemporalWindow::full_sequence
                                    : ospa_eval::TemporalWindow::union_of_domains;
  return c;
}

void emit(const json& report, const EvalFlags& f) {
  const std::string text = f.format == "csv" ? ospa_eval::report_to_csv(report) : report.dump(2) + "\n";
  if (f.out.empty()) {
    std::cout << text;
  } else {
    ospa_eval::write_text_file(f.out, text);
  }
}

struct ValidateFlags {
  std::string input, taxonomy;
  std::string mode = "tracking";
  std::string world = "closed";
};

int run_validate(const ValidateFlags& f) {
  std::vector<ospa_eval::Issue> issues;
  std::optional<ospa_eval::Taxonomy> taxonomy;
  try {
    taxonomy = ospa_eval::load_taxonomy(f.taxonomy);
  } catch (const ospa_eval::ValidationError& e) {
    issues = e.issues();
  } catch (const ospa_eval::Error& e) {
    issues.push_back({e.kind(), e.what()});
  }
  std::optional<ospa_eval::Manifest> manifest;
  try {
    manifest = ospa_eval::parse_manifest(ospa_eval::read_json_file(f.input), fs::path(f.input).parent_path());
  } catch (const ospa_eval::ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  } catch (const ospa_eval::Error& e) {
    issues.push_back({e.kind(), e.what()});
  }
  if (!taxonomy || !manifest) {
    print_issues(issues);
    return kExitInvalid;
  }
  const ospa_eval::LoadOptions options{
      f.mode == "segmentation" ? ospa_eval::AnnotationMode::segmentation : ospa_eval::AnnotationMode::tracking,
      f.world == "open" ? ospa_eval::Vocabulary::open : ospa_eval::Vocabulary::closed};
  for (const auto& entry : manifest->sequences) {
    std::vector<ospa_eval::Issue> file_issues;
    std::vector<std::string> warnings;
    std::size_t frames = 0, segments = 0;
    try {
      const auto seq = ospa_eval::load_sequence(entry.path, *taxonomy, options, &warnings);
      frames = seq.frames.size();
      for (const auto& fr : seq.frames) segments += fr.segments.size();
    } catch (const ospa_eval::ValidationError& e) {
      file_issues = e.issues();
    } catch (const ospa_eval::Error& e) {
      file_issues.push_back({e.kind(), e.what()});
    }
    if (file_issues.empty()) {
      std::cout << "OK   " << entry.id << " " << entry.path.string() << " frames=" << frames
                << " segments=" << segments << " warnings=" << warnings.size() << "\n";
    } else {
      std::cout << "FAIL " << entry.id << " " << entry.path.string() << " violations=" << file_issues.size() << "\n";
    }
    for (const auto& w : warnings) std::cout << "  warning: " << w << "\n";
    issues.insert(issues.end(), file_issues.begin(), file_issues.end());
  }
  if (!issues.empty()) {
    print_issues(issues);
    return kExitInvalid;
  }
  return kExitOk;
}

struct SynthFlags {
  ospa_eval::SynthParams params;
  ospa_eval::PerturbParams perturb;
  std::uint64_t seed = 0;
  std::size_t sequences = 1;
  std::string out_dir;
  bool no_pred = false;
};

// Sequence i is generated from seed + i and perturbed from a stream derived
// from the same value, so every file depends only on the flags.
int run_synth(const SynthFlags& f) {
  ospa_eval::SynthParams p = f.params;
  p.seed = f.seed;
  const ospa_eval::Taxonomy taxonomy = ospa_eval::synth_taxonomy(p);
  const fs::path root(f.out_dir);
  ospa_eval::write_text_file(root / "taxonomy.json", ospa_eval::taxonomy_to_json(taxonomy).dump(2) + "\n");
  ospa_eval::Manifest gt{"synthetic_gt", {}}, pred{"synthetic_pred", {}};
  for (std::size_t i = 0; i < f.sequences; ++i) {
    ospa_eval::SynthParams sp = p;
    sp.seed = f.seed + i;
    sp.sequence_id = "seq_" + std::to_string(i);
    const auto seq = ospa_eval::generate(sp);
    const std::string file = sp.sequence_id + ".json";
    ospa_eval::save_sequence(root / "gt" / file, seq);
    gt.sequences.push_back({sp.sequence_id, file});
    if (!f.no_pred) {
      const std::uint64_t perturb_seed = sp.seed ^ 0x9e3779b97f4a7c15ULL;
      ospa_eval::save_sequence(root / "pred" / file, ospa_eval::perturb(seq, taxonomy, f.perturb, perturb_seed));
      pred.sequences.push_back({sp.sequence_id, file});
    }
  }
  ospa_eval::save_manifest(root / "gt" / "manifest.json", gt);
  if (!f.no_pred) ospa_eval::save_manifest(root / "pred" / "manifest.json", pred);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate panoptic segmentation and tracking with OSPA-based metrics"};
  app.require_subcommand(1);

  EvalFlags ps_flags, pt_flags;
  auto* ps = app.add_subcommand("eval-ps", "evaluate panoptic segmentation");
  add_eval_flags(ps, ps_flags, false);
  auto* pt = app.add_subcommand("eval-pt", "evaluate panoptic tracking");
  add_eval_flags(pt, pt_flags, true);

  ValidateFlags vflags;
  auto* validate = app.add_subcommand("validate", "check annotation files without evaluating");
  validate->add_option("--input", vflags.input, "manifest to check")->required();
  validate->add_option("--taxonomy", vflags.taxonomy, "taxonomy file")->required();
  validate->add_option("--mode", vflags.mode, "tracking requires track ids on things")
      ->check(CLI::IsMember({"tracking", "segmentation"}));
  validate->add_option("--world", vflags.world, "vocabulary")->check(CLI::IsMember({"closed", "open"}));

  SynthFlags sflags;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset and a perturbed prediction");
  auto& sp = sflags.params;
  auto& pp = sflags.perturb;
  synth->add_option("--seed", sflags.seed, "random seed")->required();
  synth->add_option("--out", sflags.out_dir, "output directory")->required();
  synth->add_option("--sequences", sflags.sequences, "number of sequences")->check(CLI::PositiveNumber);
  synth->add_option("--frames", sp.frames, "frames per sequence");
  synth->add_option("--height", sp.height, "frame height");
  synth->add_option("--width", sp.width, "frame width");
  synth->add_option("--thing-classes", sp.thing_classes, "thing classes");
  synth->add_option("--stuff-classes", sp.stuff_classes, "stuff classes");
  synth->add_option("--unknown-thing-classes", sp.unknown_thing_classes, "thing classes marked unknown");
  synth->add_option("--objects-min", sp.objects_min, "objects per thing class, lower bound");
  synth->add_option("--objects-max", sp.objects_max, "objects per thing class, upper bound");
  synth->add_option("--size-min", sp.size_min, "object side, lower bound (pixels)");
  synth->add_option("--size-max", sp.size_max, "object side, upper bound (pixels)");
  synth->add_option("--motion-step", sp.motion_step, "max speed per axis (pixels/frame)");
  synth->add_option("--drop-prob", pp.drop_prob, "probability of dropping a segment");
  synth->add_option("--id-switch-prob", pp.id_switch_prob, "probability of a persistent id switch");
  synth->add_option("--class-flip-prob", pp.class_flip_prob, "probability of a class flip");
  synth->add_option("--shift-px", pp.shift_px, "max translation per axis (pixels)");
  synth->add_option("--iou-jitter", pp.iou_jitter, "max erosion/dilation radius (pixels)");
  synth->add_flag("--no-pred", sflags.no_pred, "write ground truth only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_issues({{ospa_eval::ErrorKind::config, e.what()}});
    return kExitInvalid;
  }

  try {
    if (ps->parsed()) {
      emit(ospa_eval::evaluate_ps_files(ps_flags.gt, ps_flags.pred, ps_flags.taxonomy, to_config(ps_flags)), ps_flags);
    } else if (pt->parsed()) {
      emit(ospa_eval::evaluate_pt_files(pt_flags.gt, pt_flags.pred, pt_flags.taxonomy, to_config(pt_flags)), pt_flags);
    } else if (validate->parsed()) {
      return run_validate(vflags);
    } else if (synth->parsed()) {
      return run_synth(sflags);
    }
    return kExitOk;
  } catch (const ospa_eval::ValidationError& e) {
    print_issues(e.issues());
    return kExitInvalid;
  } catch (const ospa_eval::Error& e) {
    print_issues({{e.kind(), e.what()}});
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << json{{"errors", {{{"kind", "internal"}, {"message", e.what()}}}}}.dump(2) << "\n";
    return kExitInternal;
  }
}
