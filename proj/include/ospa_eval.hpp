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

// Umbrella header.

#pragma once

#include "ospa_eval/annotation.hpp"
#include "ospa_eval/assignment.hpp"
#include "ospa_eval/baseline_metrics.hpp"
#include "ospa_eval/error.hpp"
#include "ospa_eval/evaluate.hpp"
#include "ospa_eval/flatten.hpp"
#include "ospa_eval/io.hpp"
#include "ospa_eval/mask.hpp"
#include "ospa_eval/numeric.hpp"
#include "ospa_eval/ospa.hpp"
#include "ospa_eval/ospa_track.hpp"
#include "ospa_eval/synth.hpp"
#include "ospa_eval/version.hpp"
