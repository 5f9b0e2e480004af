// Copyright 2026 The LowPose Authors
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

#include <string>
#include <vector>

#include "lowpose/eval.hpp"
#include "lowpose/fusion.hpp"

namespace lowpose {

std::string eval_report_json(const EvalReport& report);
std::string eval_report_text(const EvalReport& report);

std::string center_error_json(const CenterErrorReport& report);
std::string center_error_text(const CenterErrorReport& report);

std::string pseudo_label_json(const std::vector<PseudoLabelRow>& rows);
/// One row per threshold: main, comp and additional counts.
std::string pseudo_label_text(const std::vector<PseudoLabelRow>& rows);

}  // namespace lowpose
