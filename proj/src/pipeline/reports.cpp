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

#include "lowpose/pipeline/reports.hpp"

#include <cstdio>

#include "json_util.hpp"

namespace lowpose {

using detail::Json;

namespace {

std::string format(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, a);
  return buf;
}

std::string dump(const Json& j) { return j.dump(1) + "\n"; }

}  // namespace

std::string eval_report_json(const EvalReport& report) {
  Json per = Json::array();
  for (const auto& [t, ap] : report.ap_per_threshold) per.push_back({{"oks", t}, {"ap", ap}});
  return dump({{"ap_mean", report.ap_mean},
               {"n_gt", report.n_gt},
               {"n_pred", report.n_pred},
               {"ap_per_threshold", std::move(per)}});
}

std::string eval_report_text(const EvalReport& report) {
  std::string out = "AP@[0.50:0.95] = " + format("%.4f", report.ap_mean) + "  (" +
                    std::to_string(report.n_pred) + " predictions, " +
                    std::to_string(report.n_gt) + " ground truths)\n";
  for (const auto& [t, ap] : report.ap_per_threshold) {
    out += "  AP@" + format("%.2f", t) + " = " + format("%.4f", ap) + "\n";
  }
  return out;
}

std::string center_error_json(const CenterErrorReport& report) {
  return dump({{"match_radius", report.match_radius},
               {"n_matched", report.n_matched},
               {"n_gt", report.n_gt},
               {"mean_error", report.mean_error},
               {"variance", report.variance},
               {"histogram", {{"edges", report.histogram.edges}, {"counts", report.histogram.counts}}},
               {"errors", report.errors}});
}

std::string center_error_text(const CenterErrorReport& report) {
  std::string out = "matched " + std::to_string(report.n_matched) + " of " +
                    std::to_string(report.n_gt) + " centers within " +
                    format("%g", report.match_radius) + " px\n";
  out += "mean error " + format("%.4f", report.mean_error) + " px, variance " +
         format("%.4f", report.variance) + "\n";
  const auto& h = report.histogram;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += "  [" + format("%g", h.edges[i]) + ", " + format("%g", h.edges[i + 1]) + ") " +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

std::string pseudo_label_json(const std::vector<PseudoLabelRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"oks_threshold", r.oks_threshold},
                   {"n_main_valid", r.n_main_valid},
                   {"n_comp_valid", r.n_comp_valid},
                   {"n_additional", r.n_additional},
                   {"pct_additional", r.pct_additional}});
  }
  return dump(arr);
}

std::string pseudo_label_text(const std::vector<PseudoLabelRow>& rows) {
  std::string out = "OKS   main  comp  additional\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.2f  %4d  %4d  %4d (+%.1f%%)\n", r.oks_threshold,
                  r.n_main_valid, r.n_comp_valid, r.n_additional, r.pct_additional);
    out += buf;
  }
  return out;
}

}  // namespace lowpose
