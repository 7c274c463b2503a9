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

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ospa_eval {

// Every error the toolkit raises on bad input carries one of these kinds.
// Anything thrown that is not an ospa_eval::Error is an internal failure.
enum class ErrorKind {
  malformed_counts,
  dimension_mismatch,
  empty_matrix,
  size_limit,
  unknown_class,
  class_mismatch,
  duplicate_frame,
  duplicate_track,
  missing_track_id,
  multi_label_input,
  duplicate_name,
  duplicate_id,
  bad_kind,
  bad_split,
  unknown_alias_target,
  schema,
  invariant_violation,
  infeasible_params,
  io,
  config,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_counts: return "malformed-counts";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::empty_matrix: return "empty-matrix";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::unknown_class: return "unknown-class";
    case ErrorKind::class_mismatch: return "class-mismatch";
    case ErrorKind::duplicate_frame: return "duplicate-frame-id";
    case ErrorKind::duplicate_track: return "duplicate-track-id";
    case ErrorKind::missing_track_id: return "missing-track-id";
    case ErrorKind::multi_label_input: return "multi-label-input";
    case ErrorKind::duplicate_name: return "duplicate-name";
    case ErrorKind::duplicate_id: return "duplicate-id";
    case ErrorKind::bad_kind: return "bad-kind";
    case ErrorKind::bad_split: return "bad-split";
    case ErrorKind::unknown_alias_target: return "unknown-alias-target";
    case ErrorKind::schema: return "schema";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::infeasible_params: return "infeasible-params";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Issue {
  ErrorKind kind;
  std::string message;

  friend bool operator==(const Issue&, const Issue&) = default;
};

// Raised when a file or object fails validation. Holds every violation found,
// not just the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues)
      : Error(issues.empty() ? ErrorKind::invariant_violation : issues.front().kind,
              summarize(issues)),
        issues_(std::move(issues)) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    if (issues.empty()) return "validation failed";
    std::string out = issues.front().message;
    if (issues.size() > 1) {
      out += " (and " + std::to_string(issues.size() - 1) + " more)";
    }
    return out;
  }

  std::vector<Issue> issues_;
};

}  // namespace ospa_eval
